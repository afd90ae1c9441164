"""Print the parity labels that survive one symbolic Picard update.

    python scripts/closure_table.py [--degenerate] [--all]

With ``--all`` every divergence-compatible candidate is listed with its image;
otherwise only the closed labels are shown.
"""

from __future__ import annotations

import argparse

from herzlab.symmetry import NO_SYMMETRY, X2_LABEL, closure_table, counterexample_labels, update_label


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degenerate", action="store_true", help="allow vanishing real or imaginary parts")
    ap.add_argument("--all", action="store_true", help="list every candidate, not only closed ones")
    args = ap.parse_args()

    rows = closure_table(args.degenerate)
    shown = rows if args.all else [r for r in rows if r.fixed]
    for r in shown:
        image = "NO_SYMMETRY" if r.image is NO_SYMMETRY else str(r.image)
        mark = "closed" if r.fixed else "      "
        print(f"{mark}  {r.label.bits()}  {r.label}  ->  {image}")
    closed = [r.label for r in rows if r.fixed]
    print(f"\n{len(closed)} closed labels out of {len(rows)} candidates; X2 closed: {X2_LABEL in closed}")
    for name, lab in counterexample_labels().items():
        if lab is NO_SYMMETRY:
            print(f"counterexample ({name}): no parity label")
            continue
        image = update_label(lab)
        print(f"counterexample ({name}): {lab} -> {'NO_SYMMETRY' if image is NO_SYMMETRY else image}")


if __name__ == "__main__":
    main()
