"""Finite groups as fully validated multiplication tables.

Groups are dense n×n index tables checked for the group axioms at
construction.  Associativity is proven, not sampled: the table passes
Light's test against a generating set whose closure is verified first,
which is equivalent to the full triple check but runs in |gens|·n² rather
than n³.  Verbal subgroups (m-th powers, commutators) are computed by
scanning *all* elements or pairs of the relevant subgroups and then closing
— generator-only scans are a known trap and are deliberately avoided.

Everything is immutable after construction and all operations are pure.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

#: Hard cap on group orders; everything here is desk scale by design.
DEFAULT_MAX_ORDER = 4096
#: Cap on homomorphism-enumeration targets.
HOM_TARGET_LIMIT = 512
#: Cap on isomorphism testing.
ISO_LIMIT = 512
#: Cap for exhaustive subgroup-lattice walks.
NORMAL_ENUM_LIMIT = 64

__all__ = [
    "DEFAULT_MAX_ORDER",
    "HOM_TARGET_LIMIT",
    "ISO_LIMIT",
    "NORMAL_ENUM_LIMIT",
    "FibredProduct",
    "FiniteGroup",
    "GroupHom",
    "QCentralSeries",
    "QuotientData",
    "Subgroup",
    "build_group",
    "center",
    "commutator_subgroup",
    "direct_product",
    "element_orders",
    "enumerate_homs",
    "exponent",
    "fibred_product",
    "is_abelian",
    "is_isomorphic",
    "normal_subgroups_within",
    "order_profile",
    "power_subgroup",
    "preset",
    "q_central_series",
    "quotient",
    "subgroup_closure",
    "trivial_subgroup",
    "whole_group",
]


# ---------------------------------------------------------------------------
# construction helpers


def _find_identity(table: np.ndarray) -> int:
    n = table.shape[0]
    idx = np.arange(n)
    for e in range(n):
        if np.array_equal(table[e], idx) and np.array_equal(table[:, e], idx):
            return e
    raise ValueError("table has no two-sided identity")


def _find_inverses(table: np.ndarray, identity: int) -> np.ndarray:
    n = table.shape[0]
    inv = np.full(n, -1, dtype=np.int64)
    rows, cols = np.nonzero(table == identity)
    for x, y in zip(rows, cols):
        inv[x] = y
    if (inv < 0).any():
        raise ValueError("table has elements without inverses")
    back = table[inv, np.arange(n)]
    if not (back == identity).all():
        raise ValueError("table has one-sided inverses only")
    return inv


def _reachable(table: np.ndarray, identity: int, gens: Sequence[int]) -> np.ndarray:
    """Elements expressible as left-associated words in ``gens`` (mask)."""
    n = table.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[identity] = True
    frontier = [identity]
    gens = list(gens)
    while frontier:
        nxt = np.unique(table[np.ix_(frontier, gens)]) if gens else np.array([], dtype=np.int64)
        fresh = nxt[~seen[nxt]]
        seen[fresh] = True
        frontier = list(fresh)
    return seen


def _greedy_generators(table: np.ndarray, identity: int) -> list[int]:
    gens: list[int] = []
    seen = _reachable(table, identity, gens)
    while not seen.all():
        gens.append(int(np.flatnonzero(~seen)[0]))
        seen = _reachable(table, identity, gens)
    return gens


def _check_associative(table: np.ndarray, gens: Sequence[int]) -> None:
    """Light's test: (x·s)·y == x·(s·y) for every generator s proves
    associativity outright once the generators' closure is the whole set."""
    for s in gens:
        left = table[table[:, s], :]
        right = table[:, table[s, :]]
        if not np.array_equal(left, right):
            raise ValueError("multiplication table is not associative")


def _compress_word(word: Sequence[str]) -> str:
    if not word:
        return "1"
    parts: list[str] = []
    for name, run in itertools.groupby(word):
        k = len(list(run))
        parts.append(name if k == 1 else f"{name}^{k}")
    return "*".join(parts)


def _bfs_tree(
    table: np.ndarray, identity: int, gens: Sequence[int]
) -> list[tuple[int, int, int]]:
    """Visit order [(element, parent, generator position)] with element = parent·gens[pos]."""
    n = table.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[identity] = True
    order: list[tuple[int, int, int]] = []
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for pos, g in enumerate(gens):
                y = int(table[x, g])
                if not seen[y]:
                    seen[y] = True
                    order.append((y, x, pos))
                    nxt.append(y)
        frontier = nxt
    return order


def _labels_from_tree(
    n: int, identity: int, tree: list[tuple[int, int, int]], gen_names: Sequence[str]
) -> tuple[str, ...]:
    words: list[list[str]] = [[] for _ in range(n)]
    for elem, parent, pos in tree:
        words[elem] = words[parent] + [gen_names[pos]]
    labels = [_compress_word(w) for w in words]
    labels[identity] = "1"
    return tuple(labels)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group as a full multiplication table of element indices."""

    table: np.ndarray
    identity: int
    inverses: np.ndarray
    generators: tuple[int, ...]
    labels: tuple[str, ...]
    name: str = "G"

    def __post_init__(self) -> None:
        t = np.asarray(self.table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("multiplication table must be square")
        n = t.shape[0]
        if n == 0 or n > DEFAULT_MAX_ORDER:
            raise ValueError(f"group order must be in [1, {DEFAULT_MAX_ORDER}], got {n}")
        if t.min() < 0 or t.max() >= n:
            raise ValueError("table entries must be element indices")
        t.flags.writeable = False
        object.__setattr__(self, "table", t)
        inv = np.asarray(self.inverses, dtype=np.int64)
        inv.flags.writeable = False
        object.__setattr__(self, "inverses", inv)
        object.__setattr__(self, "generators", tuple(int(g) for g in self.generators))

        idx = np.arange(n)
        e = self.identity
        if not (np.array_equal(t[e], idx) and np.array_equal(t[:, e], idx)):
            raise ValueError("designated identity is not an identity")
        if inv.shape != (n,) or (t[idx, inv] != e).any() or (t[inv, idx] != e).any():
            raise ValueError("inverse table is wrong")
        if not _reachable(t, e, self.generators).all():
            raise ValueError("designated generators do not generate")
        _check_associative(t, self.generators if self.generators else [e])
        if len(self.labels) != n:
            raise ValueError("need one label per element")

    # -- basic queries ------------------------------------------------------
    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def inv(self, x: int) -> int:
        return int(self.inverses[x])

    def conj(self, x: int, g: int) -> int:
        """g⁻¹ x g."""
        return int(self.table[self.table[self.inverses[g], x], g])

    def commutator(self, x: int, y: int) -> int:
        """[x, y] = x⁻¹ y⁻¹ x y."""
        t = self.table
        return int(t[t[t[self.inverses[x], self.inverses[y]], x], y])

    def power(self, x: int, m: int) -> int:
        if m < 0:
            x, m = self.inv(x), -m
        m %= int(element_orders(self)[x])
        acc = self.identity
        for _ in range(m):
            acc = int(self.table[acc, x])
        return acc

    def elements(self) -> range:
        return range(self.order)

    def label(self, x: int) -> str:
        return self.labels[x]

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order {self.order})"

    @classmethod
    def from_table(
        cls,
        table: Sequence[Sequence[int]],
        generators: Optional[Sequence[int]] = None,
        gen_names: Optional[Sequence[str]] = None,
        name: str = "G",
    ) -> "FiniteGroup":
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("multiplication table must be square")
        e = _find_identity(t)
        inv = _find_inverses(t, e)
        if generators is None:
            gens = _greedy_generators(t, e)
        else:
            gens = [int(g) for g in generators]
        if gen_names is None:
            gen_names = [f"g{i}" for i in range(len(gens))]
        if len(gen_names) != len(gens):
            raise ValueError("need one name per generator")
        tree = _bfs_tree(t, e, gens)
        labels = _labels_from_tree(t.shape[0], e, tree, gen_names)
        return cls(t, e, inv, tuple(gens), labels, name)


# ---------------------------------------------------------------------------
# element statistics


@functools.lru_cache(maxsize=None)
def element_orders(group: FiniteGroup) -> np.ndarray:
    """Vector of element orders (cached per group; groups hash by identity)."""
    n = group.order
    out = np.zeros(n, dtype=np.int64)
    cur = np.arange(n)
    k = 1
    remaining = n
    while remaining:
        done = (cur == group.identity) & (out == 0)
        out[done] = k
        remaining -= int(done.sum())
        cur = group.table[cur, np.arange(n)]
        k += 1
    out.flags.writeable = False
    return out


def order_profile(group: FiniteGroup) -> dict[int, int]:
    vals, counts = np.unique(element_orders(group), return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}


def exponent(group: FiniteGroup) -> int:
    orders = element_orders(group)
    out = 1
    for o in np.unique(orders):
        out = int(np.lcm(out, int(o)))
    return out


def is_abelian(group: FiniteGroup) -> bool:
    return bool(np.array_equal(group.table, group.table.T))


# ---------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A verified subgroup, stored as a sorted member tuple."""

    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        mem = tuple(sorted({int(m) for m in self.members}))
        object.__setattr__(self, "members", mem)
        if not mem:
            raise ValueError("subgroup cannot be empty")
        mask = np.zeros(self.parent.order, dtype=bool)
        mask[list(mem)] = True
        mask.flags.writeable = False
        object.__setattr__(self, "_mask", mask)
        if not mask[self.parent.identity]:
            raise ValueError("subgroup must contain the identity")
        block = self.parent.table[np.ix_(mem, mem)]
        if not mask[block].all():
            raise ValueError("member set is not closed under multiplication")
        if not mask[self.parent.inverses[list(mem)]].all():
            raise ValueError("member set is not closed under inversion")

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def mask(self) -> np.ndarray:
        return self._mask  # type: ignore[attr-defined]

    def contains(self, x: int) -> bool:
        return bool(self.mask[x])

    def is_whole(self) -> bool:
        return self.order == self.parent.order

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_normal(self) -> bool:
        g = np.arange(self.parent.order)
        mem = list(self.members)
        conj = self.parent.table[
            self.parent.table[np.ix_(self.parent.inverses[g], mem)], g[:, None]
        ]
        return bool(self.mask[conj].all())

    def same_as(self, other: "Subgroup") -> bool:
        return self.parent is other.parent and self.members == other.members

    def __repr__(self) -> str:
        return f"Subgroup(order {self.order} of {self.parent.name})"


def whole_group(group: FiniteGroup) -> Subgroup:
    return Subgroup(group, tuple(range(group.order)))


def trivial_subgroup(group: FiniteGroup) -> Subgroup:
    return Subgroup(group, (group.identity,))


def subgroup_closure(group: FiniteGroup, seeds: Iterable[int]) -> Subgroup:
    """Smallest subgroup containing ``seeds``: repeated product closure."""
    current = np.unique(np.array([group.identity, *seeds], dtype=np.int64))
    while True:
        products = np.unique(group.table[np.ix_(current, current)])
        if products.size == current.size:
            return Subgroup(group, tuple(int(x) for x in current))
        current = products


def subgroup_as_group(sub: Subgroup) -> FiniteGroup:
    """A standalone FiniteGroup on the members of ``sub``.

    Element i of the result is ``sub.members[i]``; use the member tuple to
    translate indices back into the parent group.
    """
    mem = np.array(sub.members, dtype=np.int64)
    pos = np.full(sub.parent.order, -1, dtype=np.int64)
    pos[mem] = np.arange(mem.size)
    table = pos[sub.parent.table[np.ix_(mem, mem)]]
    return FiniteGroup.from_table(table, name=f"{sub.parent.name}-sub{mem.size}")


def power_subgroup(group: FiniteGroup, sub: Subgroup, m: int) -> Subgroup:
    """Subgroup generated by the m-th powers of *every* element of ``sub``."""
    mem = np.array(sub.members, dtype=np.int64)
    acc = np.full(mem.size, group.identity, dtype=np.int64)
    for _ in range(int(m)):
        acc = group.table[acc, mem]
    return subgroup_closure(group, np.unique(acc))


def commutator_subgroup(group: FiniteGroup, left: Subgroup, right: Subgroup) -> Subgroup:
    """Subgroup generated by [h, k] over *all* pairs h ∈ left, k ∈ right."""
    t = group.table
    h = np.array(left.members, dtype=np.int64)
    k = np.array(right.members, dtype=np.int64)
    hk = t[np.ix_(h, k)]
    inv_part = t[np.ix_(group.inverses[h], group.inverses[k])]
    # [h,k] = (h⁻¹k⁻¹)(hk); row i, column j pairs h_i with k_j in both factors
    comms = t[inv_part, hk]
    return subgroup_closure(group, np.unique(comms))


def center(group: FiniteGroup) -> Subgroup:
    members = [
        x for x in group.elements() if np.array_equal(group.table[x], group.table[:, x])
    ]
    return Subgroup(group, tuple(members))


# ---------------------------------------------------------------------------
# q-central series


@dataclass(frozen=True, eq=False)
class QCentralSeries:
    """The descending q-central series of a group, plus its level-3 refinement.

    ``terms[0]`` is the whole group; ``terms[i] = (terms[i-1])^q · [terms[i-1], G]``.
    ``lower3`` is the refinement G^{δq}·[G⁽²⁾, G] with δ = 2 for p = 2 and 1
    otherwise; it always sits between terms 3 and 2 of the series, and
    coincides with term 3 when q = 2.
    """

    group: FiniteGroup
    q: int
    p: int
    s: int
    delta: int
    terms: tuple[Subgroup, ...]
    lower3: Subgroup
    stabilized_at: int

    def term(self, i: int) -> Subgroup:
        """G^(i), 1-based; beyond the computed range the series has stabilized."""
        if i < 1:
            raise ValueError("series terms are 1-based")
        return self.terms[min(i, len(self.terms)) - 1]


def q_central_series(group: FiniteGroup, q: int, depth: Optional[int] = None) -> QCentralSeries:
    from qcoh.zqlin import factor_prime_power

    p, s = factor_prime_power(q)
    if depth is not None and depth < 3:
        raise ValueError("depth below 3 would truncate the level-3 data")
    delta = 2 if p == 2 else 1
    terms = [whole_group(group)]
    while True:
        prev = terms[-1]
        powers = power_subgroup(group, prev, q)
        comms = commutator_subgroup(group, prev, whole_group(group))
        nxt = subgroup_closure(group, powers.members + comms.members)
        terms.append(nxt)
        if nxt.members == prev.members or (depth is not None and len(terms) >= depth):
            break
    stabilized_at = len(terms) - 1 if terms[-1].members == terms[-2].members else len(terms)

    dq_powers = power_subgroup(group, whole_group(group), delta * q)
    two = terms[min(2, len(terms)) - 1]
    bracket = commutator_subgroup(group, two, whole_group(group))
    lower3 = subgroup_closure(group, dq_powers.members + bracket.members)

    series = QCentralSeries(group, q, p, s, delta, tuple(terms), lower3, stabilized_at)
    three = series.term(3)
    if not all(series.lower3.contains(x) for x in three.members):
        raise AssertionError("level-3 refinement must contain term 3")
    if not all(two.contains(x) for x in series.lower3.members):
        raise AssertionError("level-3 refinement must lie in term 2")
    if q == 2 and series.lower3.members != three.members:
        raise AssertionError("for q = 2 the refinement equals term 3")
    for t in series.terms:
        if not t.is_normal():
            raise AssertionError("series terms are verbal, hence normal")
    return series


# ---------------------------------------------------------------------------
# homomorphisms and quotients


@dataclass(frozen=True, eq=False)
class GroupHom:
    """A homomorphism given by its full image table; multiplicativity is checked."""

    source: FiniteGroup
    target: FiniteGroup
    images: np.ndarray

    def __post_init__(self) -> None:
        img = np.asarray(self.images, dtype=np.int64)
        img.flags.writeable = False
        object.__setattr__(self, "images", img)
        n = self.source.order
        if img.shape != (n,):
            raise ValueError("need one image per source element")
        if img.min() < 0 or img.max() >= self.target.order:
            raise ValueError("images must be target indices")
        if int(img[self.source.identity]) != self.target.identity:
            raise ValueError("identity must map to identity")
        lhs = img[self.source.table]
        rhs = self.target.table[img[:, None], img[None, :]]
        if not np.array_equal(lhs, rhs):
            raise ValueError("map is not multiplicative")

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def kernel(self) -> Subgroup:
        mem = np.flatnonzero(self.images == self.target.identity)
        return Subgroup(self.source, tuple(int(x) for x in mem))

    def image_members(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.unique(self.images))

    def is_surjective(self) -> bool:
        return len(self.image_members()) == self.target.order

    def is_injective(self) -> bool:
        return len(self.image_members()) == self.source.order

    def compose(self, first: "GroupHom") -> "GroupHom":
        """self ∘ first."""
        if first.target is not self.source:
            raise ValueError("composition mismatch")
        return GroupHom(first.source, self.target, self.images[first.images])

    def __repr__(self) -> str:
        return f"GroupHom({self.source.name} -> {self.target.name})"


@dataclass(frozen=True, eq=False)
class QuotientData:
    """A quotient group together with the projection and coset representatives."""

    quotient: FiniteGroup
    projection: GroupHom
    coset_reps: np.ndarray

    @property
    def source(self) -> FiniteGroup:
        return self.projection.source


def quotient(group: FiniteGroup, normal: Subgroup) -> QuotientData:
    if normal.parent is not group:
        raise ValueError("subgroup belongs to a different group")
    if not normal.is_normal():
        raise ValueError("can only quotient by a normal subgroup")
    mem = list(normal.members)
    # left cosets xN, canonical representative = smallest member index
    coset_min = group.table[:, mem].min(axis=1)
    reps = np.unique(coset_min)
    coset_index = np.searchsorted(reps, coset_min)
    m = reps.size
    qt = coset_index[group.table[np.ix_(reps, reps)]]

    gen_images: list[int] = []
    gen_names: list[str] = []
    for g in group.generators:
        ci = int(coset_index[g])
        if ci != coset_index[group.identity] and ci not in gen_images:
            gen_images.append(ci)
            gen_names.append(group.labels[g])
    if not gen_images and m > 1:  # pragma: no cover - generators always cover quotients
        raise AssertionError("generator images must cover a nontrivial quotient")
    quot = FiniteGroup.from_table(
        qt, generators=gen_images, gen_names=gen_names, name=f"{group.name}/N"
    )
    proj = GroupHom(group, quot, coset_index)
    if proj.kernel().members != normal.members:
        raise AssertionError("projection kernel must equal the quotienting subgroup")
    if not proj.is_surjective():
        raise AssertionError("projection must be surjective")
    return QuotientData(quot, proj, reps)


def _extend_gen_images(
    source: FiniteGroup,
    tree: list[tuple[int, int, int]],
    assignment: Sequence[int],
    target: FiniteGroup,
) -> np.ndarray:
    images = np.full(source.order, -1, dtype=np.int64)
    images[source.identity] = target.identity
    tt = target.table
    for elem, parent, pos in tree:
        images[elem] = tt[images[parent], assignment[pos]]
    return images


def _is_multiplicative(source: FiniteGroup, target: FiniteGroup, images: np.ndarray) -> bool:
    lhs = images[source.table]
    rhs = target.table[images[:, None], images[None, :]]
    return bool(np.array_equal(lhs, rhs))


def enumerate_homs(
    source: FiniteGroup,
    target: FiniteGroup,
    surjective_only: bool = False,
) -> tuple[GroupHom, ...]:
    """All homomorphisms source → target, by backtracking over generator images.

    Complete: a homomorphism is determined by its generator images, and every
    image tuple whose breadth-first extension passes the full multiplicativity
    check is kept.  Candidates are pruned to target elements whose order
    divides the generator's order.
    """
    if target.order > HOM_TARGET_LIMIT:
        raise ValueError(f"homomorphism target capped at {HOM_TARGET_LIMIT} elements")
    if source.order > DEFAULT_MAX_ORDER:
        raise ValueError("source exceeds the order cap")
    gens = list(source.generators)
    if not gens:
        only = GroupHom(source, target, np.full(1, target.identity, dtype=np.int64))
        return (only,) if (not surjective_only or target.order == 1) else ()
    src_orders = element_orders(source)
    tgt_orders = element_orders(target)
    candidates = [
        [int(b) for b in np.flatnonzero(src_orders[g] % tgt_orders == 0)] for g in gens
    ]
    tree = _bfs_tree(source.table, source.identity, gens)
    out = []
    for assignment in itertools.product(*candidates):
        images = _extend_gen_images(source, tree, assignment, target)
        if not _is_multiplicative(source, target, images):
            continue
        if surjective_only and np.unique(images).size != target.order:
            continue
        out.append(GroupHom(source, target, images))
    return tuple(out)


def is_isomorphic(left: FiniteGroup, right: FiniteGroup) -> bool:
    """Isomorphism test: invariant pre-screen, then generator-image backtracking."""
    if max(left.order, right.order) > ISO_LIMIT:
        raise ValueError(f"isomorphism test capped at {ISO_LIMIT} elements")
    if left.order != right.order:
        return False
    if order_profile(left) != order_profile(right):
        return False
    if is_abelian(left) != is_abelian(right):
        return False
    if is_abelian(left):
        # equal order profiles classify finite abelian groups
        return True
    if center(left).order != center(right).order:
        return False
    ab_left = quotient(left, commutator_subgroup(left, whole_group(left), whole_group(left)))
    ab_right = quotient(right, commutator_subgroup(right, whole_group(right), whole_group(right)))
    if order_profile(ab_left.quotient) != order_profile(ab_right.quotient):
        return False

    gens = list(left.generators)
    tree = _bfs_tree(left.table, left.identity, gens)
    src_orders = element_orders(left)
    tgt_orders = element_orders(right)
    candidates = [
        [int(b) for b in np.flatnonzero(tgt_orders == src_orders[g])] for g in gens
    ]
    for assignment in itertools.product(*candidates):
        images = _extend_gen_images(left, tree, assignment, right)
        if np.unique(images).size != right.order:
            continue
        if _is_multiplicative(left, right, images):
            return True
    return False


def normal_subgroups_within(group: FiniteGroup, sub: Subgroup) -> tuple[Subgroup, ...]:
    """All subgroups of ``sub`` that are normal in ``group`` (lattice walk)."""
    if sub.order > NORMAL_ENUM_LIMIT:
        raise ValueError(f"subgroup lattice walk capped at {NORMAL_ENUM_LIMIT} elements")
    seen: set[tuple[int, ...]] = set()
    frontier = [subgroup_closure(group, [group.identity]).members]
    seen.add(frontier[0])
    while frontier:
        base = frontier.pop()
        for x in sub.members:
            if x in base:
                continue
            grown = subgroup_closure(group, base + (x,)).members
            if grown not in seen and all(sub.contains(m) for m in grown):
                seen.add(grown)
                frontier.append(grown)
    out = [Subgroup(group, mem) for mem in sorted(seen, key=lambda m: (len(m), m))]
    return tuple(s for s in out if s.is_normal())


# ---------------------------------------------------------------------------
# products


def direct_product(left: FiniteGroup, right: FiniteGroup, name: Optional[str] = None) -> FiniteGroup:
    nl, nr = left.order, right.order
    if nl * nr > DEFAULT_MAX_ORDER:
        raise ValueError("direct product exceeds the order cap")
    li, ri = np.divmod(np.arange(nl * nr), nr)
    table = left.table[np.ix_(li, li)] * nr + right.table[np.ix_(ri, ri)]
    # pair (x, y) ↦ index x*nr + y; generators from both factors
    gens = [g * nr + right.identity for g in left.generators]
    gens += [left.identity * nr + g for g in right.generators]
    gen_names = [f"a{i}" for i in range(len(left.generators))]
    gen_names += [f"b{i}" for i in range(len(right.generators))]
    label = name or f"{left.name}x{right.name}"
    return FiniteGroup.from_table(table, generators=gens, gen_names=gen_names, name=label)


@dataclass(frozen=True, eq=False)
class FibredProduct:
    """The pullback {(b, p) : f(b) = g(p)} with its two projections."""

    group: FiniteGroup
    left: GroupHom
    right: GroupHom


def fibred_product(f: GroupHom, g: GroupHom) -> FibredProduct:
    if f.target is not g.target:
        raise ValueError("fibred product needs a common target")
    nb, np_ = f.source.order, g.source.order
    match = f.images[:, None] == g.images[None, :]
    bidx, pidx = np.nonzero(match)
    n = bidx.size
    if n > DEFAULT_MAX_ORDER:
        raise ValueError("fibred product exceeds the order cap")
    pair_to_index = np.full(nb * np_, -1, dtype=np.int64)
    pair_to_index[bidx * np_ + pidx] = np.arange(n)
    tb, tp = f.source.table, g.source.table
    table = pair_to_index[tb[np.ix_(bidx, bidx)] * np_ + tp[np.ix_(pidx, pidx)]]
    grp = FiniteGroup.from_table(table, name=f"{f.source.name}x_Q{g.source.name}")
    left = GroupHom(grp, f.source, bidx)
    right = GroupHom(grp, g.source, pidx)
    return FibredProduct(grp, left, right)


# ---------------------------------------------------------------------------
# presets


def _cyclic(n: int) -> FiniteGroup:
    if n < 1 or n > DEFAULT_MAX_ORDER:
        raise ValueError(f"cyclic order must be in [1, {DEFAULT_MAX_ORDER}]")
    table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    gens = [1] if n > 1 else []
    return FiniteGroup.from_table(table, generators=gens, gen_names=["g"][: len(gens)], name=f"Z/{n}")


def _elementary_abelian(q: int, d: int) -> FiniteGroup:
    """(Z/q)^d; elementary abelian when q is prime, homocyclic in general."""
    from qcoh.zqlin import factor_prime_power

    factor_prime_power(q)
    if d < 1 or q**d > DEFAULT_MAX_ORDER:
        raise ValueError("rank must be >= 1 and the order within the cap")
    n = q**d
    digits = np.array([[(x // q**i) % q for i in range(d)] for x in range(n)], dtype=np.int64)
    sums = (digits[:, None, :] + digits[None, :, :]) % q
    table = sums @ (q ** np.arange(d))
    gens = [q**i for i in range(d)]
    names = [f"x{i}" for i in range(d)]
    return FiniteGroup.from_table(table, generators=gens, gen_names=names, name=f"(Z/{q})^{d}")


def _heisenberg(p: int) -> FiniteGroup:
    """Order p³, exponent p (p odd): upper unitriangular 3×3 matrices over Z/p."""
    if p < 3 or any(p % k == 0 for k in range(2, p)):
        raise ValueError("heisenberg preset needs an odd prime")
    n = p**3

    def enc(a: int, b: int, c: int) -> int:
        return (a % p) * p * p + (b % p) * p + (c % p)

    table = np.zeros((n, n), dtype=np.int64)
    for a1 in range(p):
        for b1 in range(p):
            for c1 in range(p):
                i = enc(a1, b1, c1)
                for a2 in range(p):
                    for b2 in range(p):
                        for c2 in range(p):
                            table[i, enc(a2, b2, c2)] = enc(a1 + a2, b1 + b2, c1 + c2 + a1 * b2)
    r, s = enc(1, 0, 0), enc(0, 1, 0)
    grp = FiniteGroup.from_table(table, generators=[r, s], gen_names=["r", "s"], name=f"H_{n}")
    t = grp.commutator(r, s)
    assert t != grp.identity and grp.power(t, p) == grp.identity
    assert grp.power(r, p) == grp.identity and grp.power(s, p) == grp.identity
    return grp


def _modular(p: int) -> FiniteGroup:
    """Order p³, exponent p² (p odd): ⟨r, s | r^{p²} = s^p = 1, s⁻¹rs = r^{1+p}⟩."""
    if p < 3 or any(p % k == 0 for k in range(2, p)):
        raise ValueError("modular preset needs an odd prime")
    p2 = p * p
    n = p2 * p

    def enc(i: int, j: int) -> int:  # r^i s^j
        return (i % p2) * p + (j % p)

    table = np.zeros((n, n), dtype=np.int64)
    # s·r^k = r^{k(1+p)^{-1}}·s, so pushing s^{j} left past r^{i} twists by (1+p)^{-j}
    twist = [pow(1 + p, -j, p2) for j in range(p)]
    for i1 in range(p2):
        for j1 in range(p):
            src = enc(i1, j1)
            for i2 in range(p2):
                for j2 in range(p):
                    table[src, enc(i2, j2)] = enc(i1 + i2 * twist[j1], j1 + j2)
    r, s = enc(1, 0), enc(0, 1)
    grp = FiniteGroup.from_table(table, generators=[r, s], gen_names=["r", "s"], name=f"M_{n}")
    assert grp.commutator(r, s) == grp.power(r, p)
    assert grp.power(s, p) == grp.identity
    return grp


def _dihedral4() -> FiniteGroup:
    """D₄ of order 8: symmetries of the square, ⟨r, s | r⁴ = s² = 1, srs = r³⟩."""
    def enc(i: int, j: int) -> int:  # r^i s^j
        return (i % 4) * 2 + (j % 2)

    table = np.zeros((8, 8), dtype=np.int64)
    for i1 in range(4):
        for j1 in range(2):
            for i2 in range(4):
                for j2 in range(2):
                    sign = -1 if j1 else 1
                    table[enc(i1, j1), enc(i2, j2)] = enc(i1 + sign * i2, j1 + j2)
    grp = FiniteGroup.from_table(table, generators=[enc(1, 0), enc(0, 1)], gen_names=["r", "s"], name="D4")
    assert center(grp).order == 2
    return grp


def _quaternion8() -> FiniteGroup:
    """Q₈: ⟨x, y | x⁴ = 1, x² = y², y⁻¹xy = x⁻¹⟩."""
    def enc(i: int, j: int) -> int:  # x^i y^j
        return (i % 4) * 2 + (j % 2)

    table = np.zeros((8, 8), dtype=np.int64)
    for i1 in range(4):
        for j1 in range(2):
            for i2 in range(4):
                for j2 in range(2):
                    sign = -1 if j1 else 1
                    i = i1 + sign * i2 + 2 * ((j1 + j2) // 2)
                    table[enc(i1, j1), enc(i2, j2)] = enc(i, j1 + j2)
    grp = FiniteGroup.from_table(table, generators=[enc(1, 0), enc(0, 1)], gen_names=["x", "y"], name="Q8")
    x, y = enc(1, 0), enc(0, 1)
    assert grp.power(x, 2) == grp.power(y, 2) != grp.identity
    assert order_profile(grp) == {1: 1, 2: 1, 4: 6}
    return grp


def preset(name: str, params: Sequence = ()) -> FiniteGroup:
    """Build one of the named stock groups."""
    params = list(params)
    if name == "cyclic":
        (n,) = params
        return _cyclic(int(n))
    if name == "elementary_abelian":
        q, d = params
        return _elementary_abelian(int(q), int(d))
    if name == "heisenberg":
        (p,) = params
        return _heisenberg(int(p))
    if name == "modular":
        (p,) = params
        return _modular(int(p))
    if name == "dihedral4":
        if params:
            raise ValueError("dihedral4 takes no parameters")
        return _dihedral4()
    if name == "quaternion8":
        if params:
            raise ValueError("quaternion8 takes no parameters")
        return _quaternion8()
    if name == "direct_product":
        if len(params) < 2:
            raise ValueError("direct_product needs at least two factor specs")
        factors = [preset(f[0], f[1] if len(f) > 1 else ()) for f in params]
        out = factors[0]
        for f in factors[1:]:
            out = direct_product(out, f)
        return out
    raise ValueError(f"unknown preset {name!r}")


# ---------------------------------------------------------------------------
# group description documents


def _group_from_permutations(perms: Sequence[Sequence[int]], max_order: int) -> FiniteGroup:
    """Closure of 1-based permutation generators under composition."""
    if not perms:
        raise ValueError("need at least one permutation")
    degree = len(perms[0])
    gens = []
    for perm in perms:
        if sorted(perm) != list(range(1, degree + 1)):
            raise ValueError("permutations must be 1-based and of one common degree")
        gens.append(tuple(x - 1 for x in perm))
    ident = tuple(range(degree))
    elements = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(g[x[i]] for i in range(degree))  # apply x first, then g
                if y not in index:
                    if len(elements) >= max_order:
                        raise ValueError(f"permutation closure exceeds the order cap {max_order}")
                    index[y] = len(elements)
                    elements.append(y)
                    nxt.append(y)
        frontier = nxt
    n = len(elements)
    table = np.zeros((n, n), dtype=np.int64)
    for i, x in enumerate(elements):
        for j, y in enumerate(elements):
            table[i, j] = index[tuple(y[x[k]] for k in range(degree))]
    gen_ids = [index[g] for g in gens]
    return FiniteGroup.from_table(table, generators=gen_ids, name="perm-group")


def build_group(spec: dict, max_order: Optional[int] = None) -> FiniteGroup:
    """Build a group from a plain description dict.

    Exactly one of the keys ``preset``, ``permutations`` (1-based), ``table``
    (0-based full multiplication table) must be present; ``params`` accompanies
    ``preset`` and ``name`` is optional everywhere.
    """
    cap = max_order or DEFAULT_MAX_ORDER
    keys = [k for k in ("preset", "permutations", "table") if k in spec]
    if len(keys) != 1:
        raise ValueError("specify exactly one of: preset, permutations, table")
    kind = keys[0]
    if kind == "preset":
        grp = preset(spec["preset"], spec.get("params", ()))
    elif kind == "permutations":
        grp = _group_from_permutations(spec["permutations"], cap)
    else:
        grp = FiniteGroup.from_table(spec["table"], generators=spec.get("generators"))
    if grp.order > cap:
        raise ValueError(f"group order {grp.order} exceeds the cap {cap}")
    if "name" in spec:
        grp = FiniteGroup(grp.table, grp.identity, grp.inverses, grp.generators, grp.labels, str(spec["name"]))
    return grp
