"""Classify the central extensions of (Z/p)^2 by a degree-2 class.

Every class in H²((Z/p)², Z/p) defines an extension group of order p³; this
enumerates all of them, buckets the results by isomorphism type, and prints
the counts.  The nonabelian buckets are exactly the exponent-p and
exponent-p² groups, which is what makes them usable as detection targets
for the refined level-3 subgroup.  Usage::

    python3 scripts/extension_catalog.py [--p P]
"""

from __future__ import annotations

import argparse
from collections import Counter

from qcoh import is_isomorphic, preset
from qcoh.cohomology import extension_from_class, h2

NAMED = {
    2: [
        ("Z/2 x Z/2 x Z/2", lambda: preset("elementary_abelian", [2, 3])),
        ("Z/4 x Z/2", lambda: preset("direct_product", [("cyclic", [4]), ("cyclic", [2])])),
        ("dihedral", lambda: preset("dihedral4")),
        ("quaternion", lambda: preset("quaternion8")),
    ],
    3: [
        ("Z/3 x Z/3 x Z/3", lambda: preset("elementary_abelian", [3, 3])),
        ("Z/9 x Z/3", lambda: preset("direct_product", [("cyclic", [9]), ("cyclic", [3])])),
        ("exponent-p (heisenberg)", lambda: preset("heisenberg", [3])),
        ("exponent-p^2 (modular)", lambda: preset("modular", [3])),
    ],
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--p", type=int, default=3, choices=(2, 3))
    args = parser.parse_args()
    p = args.p

    base = preset("elementary_abelian", [p, 2])
    space = h2(base, p)
    targets = [(name, build()) for name, build in NAMED[p]]
    counts: Counter[str] = Counter()
    for coords in space.enumerate_coordinates():
        total = extension_from_class(base, space.representative(coords)).total
        for name, model in targets:
            if is_isomorphic(total, model):
                counts[name] += 1
                break
        else:
            counts[f"unrecognized order {total.order}"] += 1

    print(f"central extensions of (Z/{p})^2 by Z/{p}: {space.order} classes")
    for name, _ in targets:
        print(f"  {counts[name]:>3}  {name}")
    for name in counts:
        if name.startswith("unrecognized"):
            print(f"  {counts[name]:>3}  {name}")


if __name__ == "__main__":
    main()
