#!/usr/bin/env python3
"""Run the shipped sentences end to end and print what the pipeline sees:
candidate terms, inserted adaptations, normal forms, formulas, profiles."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from polysem.composer import compose, diagnose, parse_trees
from polysem.hol import UNICODE, classify, extract_formula, print_formula
from polysem.kernel import eta_expand
from polysem.lexicon import load_lexicon_file
from polysem.syntax import PROP, print_term, print_type

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main():
    lex = load_lexicon_file(ROOT / "fixtures" / "english.lex")
    trees = parse_trees((ROOT / "fixtures" / "trees.txt").read_text())
    for k, tree in enumerate(trees, start=1):
        analyses = compose(tree, lex)
        print(f"=== sentence {k}: {len(analyses)} analysis(es)")
        for a in analyses:
            print(f"  term:    {print_term(a.term)}")
            print(f"  normal:  {print_term(a.normal_term)}")
            print(f"  type:    {print_type(a.result_type)}")
            for occ, labels in a.labels().items():
                print(f"  adapted: {occ} via {', '.join(labels)}")
            if a.result_type == PROP:
                nf = eta_expand(a.normal_term, lex.signature)
                formula = extract_formula(nf, lex.signature)
                profile = classify(formula)
                print(f"  formula: {print_formula(formula, UNICODE)}")
                print(f"  profile: order {profile.order}, {profile.sorts} sorts")
        if not analyses:
            print(f"  blocked: {diagnose(tree, lex).describe()}")
        print()


if __name__ == "__main__":
    main()
