#!/usr/bin/env python3
"""Enumerate constant-free closed normal inhabitants of a few target types.
An empty result at (all a a) is the desk-scale consistency witness."""

import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from polysem.cli import search_false
from polysem.syntax import parse_type, print_term

TARGETS = [
    ("(all a a)", 9),
    ("(all a (-> a a))", 5),
    ("(all a (all b (-> a (-> b a))))", 7),
    ("(all a (-> (-> a a) (-> a a)))", 11),
]


def main():
    for text, size in TARGETS:
        target = parse_type(text)
        started = time.monotonic()
        found = search_false(size, target)
        elapsed = time.monotonic() - started
        print(f"{text}  (size <= {size}, {elapsed:.2f}s): {len(found)} inhabitant(s)")
        for term in found:
            print(f"  {print_term(term)}")


if __name__ == "__main__":
    main()
