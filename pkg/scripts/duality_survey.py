"""Sweep the six duality conditions over the stock groups and triples.

For every (group, triple kind) pair this prints the orders of the coefficient
subgroup T and its designated floor T₀, whether the six independently
computed conditions all hold, and the list of minimal quotients recovered
from the inflation-kernel generators.  Usage::

    python3 scripts/duality_survey.py [--max-order N]
"""

from __future__ import annotations

import argparse

from qcoh import (
    TRIPLE_KINDS,
    duality_conditions,
    extension_list,
    preset,
    triple_of,
)
from qcoh.freemodel import free_level3


def catalog(max_order: int):
    entries = [
        ("cyclic(4)", preset("cyclic", [4]), 2),
        ("cyclic(16), q=4", preset("cyclic", [16]), 4),
        ("dihedral4", preset("dihedral4"), 2),
        ("quaternion8", preset("quaternion8"), 2),
        ("heisenberg(3)", preset("heisenberg", [3]), 3),
        ("modular(3)", preset("modular", [3]), 3),
        ("sharp(2,2)", free_level3(2, 2, "sharp").group, 2),
        ("flat(2,3)", free_level3(2, 3, "flat").group, 3),
        ("sharp(2,3)", free_level3(2, 3, "sharp").group, 3),
    ]
    return [(label, g, q) for label, g, q in entries if g.order <= max_order]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-order", type=int, default=4096)
    args = parser.parse_args()

    header = f"{'group':<18} {'kind':<9} {'|T|':>4} {'|T0|':>5} {'six':>5}  quotient list"
    print(header)
    print("-" * len(header))
    for label, group, q in catalog(args.max_order):
        for kind in TRIPLE_KINDS:
            tri = triple_of(kind)
            top = tri.top(group, q)
            floor = tri.floor(group, q)
            rep = duality_conditions(group, q, top, floor, tri.alpha_image)
            verdict = "all-T" if all(rep.as_tuple()) else str(rep.as_tuple())
            names = [e.name or f"order {e.group.order}" for e in
                     extension_list(group, q, tri).entries]
            print(
                f"{label:<18} {kind:<9} {top.order:>4} {floor.order:>5} "
                f"{verdict:>5}  {names}"
            )


if __name__ == "__main__":
    main()
