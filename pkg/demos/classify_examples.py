"""Verdicts for a set of worked operators.

Run from the repository root:  python3 demos/classify_examples.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from cases import EXAMPLES  # noqa: E402

from gahtorus import OperatorSpec, cross_check_relation, decide  # noqa: E402


def main():
    print(f"{'example':26s} {'answer':12s} {'certificate':14s} P0")
    for name, (op, expected, _) in EXAMPLES.items():
        spec = OperatorSpec.make(**op)
        v = decide(spec)
        rel = cross_check_relation(spec)
        flag = "" if v.answer == expected else "  (unexpected)"
        print(f"{name:26s} {v.answer:12s} {v.kind:14s} {rel['P0']}{flag}")


if __name__ == "__main__":
    main()
