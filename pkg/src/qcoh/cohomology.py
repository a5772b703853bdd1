"""Mod-q cohomology of finite groups in degrees one and two.

Carriers are normalized inhomogeneous cochains with trivial coefficients:
degree one is a value per element (zero at the identity), degree two a value
per ordered pair (zero whenever either argument is the identity).  The
coboundary is ∂u(g,h) = u(g) + u(h) − u(gh).

Three solver ideas keep everything exact while scaling past tiny groups:

* Cocycle validation only needs the triples (x, y, s) with s running over a
  generating set.  The degree-3 coboundary of any 2-cochain c vanishes
  identically, which gives the recurrence
      C(x, y, zw) = C(y, z, w) − C(xy, z, w) + C(x, yz, w) + C(x, y, z)
  for C = δc, so vanishing on generator slices propagates to all triples by
  induction over words.  |S|·n² checks replace n³.
* Coboundary tests: a potential u with ∂u = c is an affine function of its
  values on generators (propagate u(xs) = u(x) + u(s) − c(x,s) along a BFS
  tree), and the pair constraints (x, s∈S) suffice for the same reason.  The
  result is a |S|-unknown linear solve no matter the group order.
* Full H² only ever runs on small groups (quotients): entries c(x, s) for
  s ∈ S are the unknowns, every other entry is an affine functional of them
  via c(x, ys) = c(x,y) + c(xy,s) − c(y,s), and the generator-slice triples
  are the constraint system.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from qcoh.groups import (
    FiniteGroup,
    GroupHom,
    QuotientData,
    Subgroup,
    _bfs_tree,
    q_central_series,
    quotient,
    subgroup_as_group,
)
from qcoh.zqlin import (
    AbGroupPresentation,
    HowellForm,
    ZqMatrix,
    factor_prime_power,
    howell_form,
    kernel,
    row_span_contains,
    row_span_size,
    solve,
)

__all__ = [
    "H2_CAP",
    "CentralExtensionSpec",
    "Cochain1",
    "Cochain2",
    "FiveTermReport",
    "H1Space",
    "H2Space",
    "H2Subspace",
    "HatRing",
    "InvariantH1",
    "SymbolicElementaryH2",
    "bockstein",
    "class_from_extension",
    "coboundary1",
    "cup11",
    "extension_from_class",
    "five_term_check",
    "h1",
    "h2",
    "h2_dec",
    "hat_ring",
    "hom_from_generator_values",
    "img_bockstein",
    "inflation1",
    "inflation2",
    "invariants_h1",
    "is_coboundary",
    "restriction1",
    "restriction2",
    "span_of_classes",
    "symbolic_h2_elementary",
    "tensor_kill_rows",
    "tensor_quotient",
    "transgression",
]

H2_CAP = 64


def _same_group(a: FiniteGroup, b: FiniteGroup) -> bool:
    return a is b or (
        a.order == b.order and a.identity == b.identity and np.array_equal(a.table, b.table)
    )


def _solver_gens(group: FiniteGroup) -> tuple[int, ...]:
    gens = tuple(dict.fromkeys(group.generators))
    if group.identity in gens:
        gens = tuple(g for g in gens if g != group.identity)
    return gens


# --------------------------------------------------------------------------
# cochain carriers


@dataclass(frozen=True, eq=False)
class Cochain1:
    """Normalized 1-cochain: one value mod q per group element."""

    group: FiniteGroup
    modulus: int
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.mod(np.asarray(self.values, dtype=np.int64), self.modulus)
        if v.shape != (self.group.order,):
            raise ValueError("need one value per group element")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if v[self.group.identity] != 0:
            raise ValueError("1-cochains are normalized: value 0 at the identity")

    def __call__(self, g: int) -> int:
        return int(self.values[g])

    def is_cocycle(self) -> bool:
        """True iff this is a homomorphism to Z/q.

        f(xs) = f(x) + f(s) over generator slices propagates to all pairs by
        induction over words in the second argument.
        """
        t = self.group.table
        v = self.values
        for s in _solver_gens(self.group):
            if ((v[t[:, s]] - v - v[s]) % self.modulus).any():
                return False
        return True

    def __add__(self, other: "Cochain1") -> "Cochain1":
        self._compat(other)
        return Cochain1(self.group, self.modulus, self.values + other.values)

    def __sub__(self, other: "Cochain1") -> "Cochain1":
        self._compat(other)
        return Cochain1(self.group, self.modulus, self.values - other.values)

    def __neg__(self) -> "Cochain1":
        return Cochain1(self.group, self.modulus, -self.values)

    def scale(self, k: int) -> "Cochain1":
        return Cochain1(self.group, self.modulus, self.values * int(k))

    def same_values(self, other: "Cochain1") -> bool:
        self._compat(other)
        return bool(np.array_equal(self.values, other.values))

    def _compat(self, other: "Cochain1") -> None:
        if self.modulus != other.modulus or not _same_group(self.group, other.group):
            raise ValueError("cochains live on different carriers")


@dataclass(frozen=True, eq=False)
class Cochain2:
    """Normalized 2-cochain: one value mod q per ordered element pair."""

    group: FiniteGroup
    modulus: int
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.mod(np.asarray(self.values, dtype=np.int64), self.modulus)
        n = self.group.order
        if v.shape != (n, n):
            raise ValueError("need a value per ordered pair")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        e = self.group.identity
        if v[e, :].any() or v[:, e].any():
            raise ValueError("2-cochains are normalized: zero when either argument is 1")

    def __call__(self, g: int, h: int) -> int:
        return int(self.values[g, h])

    def is_cocycle(self) -> bool:
        """Exact check of c(x,y) + c(xy,z) = c(y,z) + c(x,yz) via generator slices."""
        t = self.group.table
        c = self.values
        n = self.group.order
        q = self.modulus
        chunk = max(1, (1 << 22) // n)
        for s in _solver_gens(self.group):
            ys = t[:, s]
            for lo in range(0, n, chunk):
                hi = min(n, lo + chunk)
                xy = t[lo:hi, :]
                lhs = c[None, :, s] - c[xy, s] + c[np.arange(lo, hi)[:, None], ys[None, :]] - c[lo:hi, :]
                if (lhs % q).any():
                    return False
        return True

    def __add__(self, other: "Cochain2") -> "Cochain2":
        self._compat(other)
        return Cochain2(self.group, self.modulus, self.values + other.values)

    def __sub__(self, other: "Cochain2") -> "Cochain2":
        self._compat(other)
        return Cochain2(self.group, self.modulus, self.values - other.values)

    def __neg__(self) -> "Cochain2":
        return Cochain2(self.group, self.modulus, -self.values)

    def scale(self, k: int) -> "Cochain2":
        return Cochain2(self.group, self.modulus, self.values * int(k))

    def same_values(self, other: "Cochain2") -> bool:
        self._compat(other)
        return bool(np.array_equal(self.values, other.values))

    def _compat(self, other: "Cochain2") -> None:
        if self.modulus != other.modulus or not _same_group(self.group, other.group):
            raise ValueError("cochains live on different carriers")


def zero1(group: FiniteGroup, q: int) -> Cochain1:
    return Cochain1(group, q, np.zeros(group.order, dtype=np.int64))


def zero2(group: FiniteGroup, q: int) -> Cochain2:
    return Cochain2(group, q, np.zeros((group.order, group.order), dtype=np.int64))


def coboundary1(u: Cochain1) -> Cochain2:
    """∂u(g,h) = u(g) + u(h) − u(gh)."""
    v = u.values
    return Cochain2(u.group, u.modulus, v[:, None] + v[None, :] - v[u.group.table])


def _require_cocycle1(chi: Cochain1) -> None:
    if not chi.is_cocycle():
        raise ValueError("expected a degree-1 cocycle (homomorphism)")


def _require_cocycle2(c: Cochain2) -> None:
    if not c.is_cocycle():
        raise ValueError("expected a degree-2 cocycle")


# --------------------------------------------------------------------------
# cup product and Bockstein


def cup11(chi: Cochain1, chi2: Cochain1) -> Cochain2:
    """(χ∪χ′)(g,h) = χ(g)·χ′(h)."""
    chi._compat(chi2)
    _require_cocycle1(chi)
    _require_cocycle1(chi2)
    vals = chi.values[:, None] * chi2.values[None, :]
    out = Cochain2(chi.group, chi.modulus, vals)
    assert out.is_cocycle()
    return out


def bockstein(chi: Cochain1, lift: Optional[Sequence[int]] = None) -> Cochain2:
    """Connecting class of 0 → Z/q → Z/q² → Z/q → 0 on a degree-1 cocycle.

    Representative c(σ,τ) = (χ̃(σ) + χ̃(τ) − χ̃(στ)) / q for an integer lift χ̃
    of χ; the default lift is the least non-negative residue.  Any other lift
    gives a cohomologous representative.
    """
    _require_cocycle1(chi)
    q = chi.modulus
    if lift is None:
        tilde = chi.values.astype(np.int64)
    else:
        tilde = np.asarray(lift, dtype=np.int64)
        if tilde.shape != chi.values.shape:
            raise ValueError("lift must assign one integer per element")
        if ((tilde % q) != chi.values).any():
            raise ValueError("lift must reduce to the cocycle mod q")
        if tilde[chi.group.identity] != 0:
            raise ValueError("lift must vanish at the identity")
    num = tilde[:, None] + tilde[None, :] - tilde[chi.group.table]
    if (num % q).any():
        raise ValueError("lift failure: coboundary numerator not divisible")
    out = Cochain2(chi.group, q, num // q)
    assert out.is_cocycle()
    return out


# --------------------------------------------------------------------------
# degree-1 machinery: propagation, Hom bases, coboundary tests


def _affine_propagation(group: FiniteGroup, q: int, c: Optional[Cochain2]) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    """BFS-propagated representation u(x) = coeff[x]·U + const[x].

    U stands for the unknown values of u on the (deduplicated) generators;
    ``c`` twists the propagation for coboundary solving (None means 0).
    """
    gens = _solver_gens(group)
    d = len(gens)
    n = group.order
    coeff = np.zeros((n, d), dtype=np.int64)
    const = np.zeros(n, dtype=np.int64)
    for elem, parent, pos in _bfs_tree(group.table, group.identity, gens):
        coeff[elem] = coeff[parent]
        coeff[elem, pos] += 1
        const[elem] = const[parent] - (0 if c is None else c.values[parent, gens[pos]])
    return coeff % q, const % q, gens


def _pair_constraints(group: FiniteGroup, q: int, coeff: np.ndarray, const: np.ndarray, gens: tuple[int, ...], c: Optional[Cochain2]) -> tuple[np.ndarray, np.ndarray]:
    """Rows (A | b) of the system ∂u = c sampled on all pairs (x, s∈gens)."""
    n = group.order
    d = len(gens)
    if d == 0:
        return np.zeros((0, 0), dtype=np.int64), np.zeros(0, dtype=np.int64)
    rows = []
    rhs = []
    for k, s in enumerate(gens):
        xs = group.table[:, s]
        a = coeff - coeff[xs]
        a[:, k] += 1
        target = np.zeros(n, dtype=np.int64) if c is None else c.values[:, s].copy()
        b = (target - const + const[xs]) % q
        rows.append(a % q)
        rhs.append(b)
    big = np.concatenate([np.concatenate(rows, axis=0), np.concatenate(rhs)[:, None]], axis=1)
    big = np.unique(big % q, axis=0)
    return big[:, :d], big[:, d]


def is_coboundary(c: Cochain2) -> Optional[Cochain1]:
    """A 1-cochain u with ∂u = c, or None.  Requires c to be a cocycle.

    Unknowns are only the generator values of u, so this scales to the full
    group-order cap; the solution is verified on every pair before return.
    """
    _require_cocycle2(c)
    group, q = c.group, c.modulus
    coeff, const, gens = _affine_propagation(group, q, c)
    a, b = _pair_constraints(group, q, coeff, const, gens, c)
    sol = solve(ZqMatrix(a, q), b)
    if sol is None:
        return None
    u = Cochain1(group, q, coeff @ sol + const)
    assert coboundary1(u).same_values(c), "solver produced a non-solution"
    return u


def hom_from_generator_values(group: FiniteGroup, q: int, gen_values: Sequence[int]) -> Optional[Cochain1]:
    """The homomorphism G → Z/q with the given generator values, if it exists."""
    coeff, _, gens = _affine_propagation(group, q, None)
    u = np.asarray(gen_values, dtype=np.int64)
    if u.shape != (len(gens),):
        raise ValueError(f"need one value per deduplicated generator ({len(gens)})")
    chi = Cochain1(group, q, coeff @ u)
    return chi if chi.is_cocycle() else None


def _canonical_span_basis(rows: np.ndarray, q: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Invariant-factor basis of the row span: (basis rows, cyclic orders)."""
    rows = np.mod(np.asarray(rows, dtype=np.int64), q)
    if rows.size == 0:
        return np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0), dtype=np.int64), ()
    hf = howell_form(ZqMatrix(rows, q))
    gens = hf.matrix.entries
    if gens.shape[0] == 0:
        return np.zeros((0, rows.shape[1]), dtype=np.int64), ()
    # relations among the Howell generators = left kernel
    rel = kernel(ZqMatrix(gens.T, q)).entries
    pres = AbGroupPresentation.from_relations(gens.shape[0], q, rel)
    basis = (pres.basis_images.entries @ gens) % q
    return basis, pres.invariant_factors


@dataclass(frozen=True, eq=False)
class H1Space:
    """Hom(G, Z/q) with an invariant-factor basis.

    Elements are identified with their value vectors on the solver generator
    set; ``coordinates_of`` inverts that identification.
    """

    group: FiniteGroup
    modulus: int
    gens: tuple[int, ...]
    basis: tuple[Cochain1, ...]
    invariant_factors: tuple[int, ...]
    _gen_values: np.ndarray

    @property
    def order(self) -> int:
        n = 1
        for f in self.invariant_factors:
            n *= f
        return n

    def coordinates_of(self, chi: Cochain1) -> tuple[int, ...]:
        if not _same_group(chi.group, self.group) or chi.modulus != self.modulus:
            raise ValueError("class belongs to a different carrier")
        _require_cocycle1(chi)
        target = chi.values[list(self.gens)]
        if not self.basis:
            if target.any():
                raise ValueError("nonzero hom in a trivial Hom module")
            return ()
        sol = solve(ZqMatrix(self._gen_values.T, self.modulus), target)
        if sol is None:
            raise ValueError("hom does not lie in the computed basis span")
        return tuple(int(x) % f for x, f in zip(sol, self.invariant_factors))

    def element(self, coords: Sequence[int]) -> Cochain1:
        acc = np.zeros(self.group.order, dtype=np.int64)
        for x, chi in zip(coords, self.basis):
            acc += int(x) * chi.values
        return Cochain1(self.group, self.modulus, acc)

    def enumerate_elements(self) -> Iterable[Cochain1]:
        for coords in itertools.product(*(range(f) for f in self.invariant_factors)):
            yield self.element(coords)


def h1(group: FiniteGroup, q: int) -> H1Space:
    """Hom(G, Z/q), solved from generator unknowns and pair constraints."""
    coeff, _, gens = _affine_propagation(group, q, None)
    a, _ = _pair_constraints(group, q, coeff, np.zeros(group.order, dtype=np.int64), gens, None)
    ker = kernel(ZqMatrix(a, q)).entries if a.size else np.eye(len(gens), dtype=np.int64)
    basis_rows, factors = _canonical_span_basis(ker, q)
    basis = []
    for row in basis_rows:
        chi = Cochain1(group, q, coeff @ row)
        assert chi.is_cocycle()
        basis.append(chi)
    gen_values = np.array([chi.values[list(gens)] for chi in basis], dtype=np.int64).reshape(len(basis), len(gens))
    return H1Space(group, q, gens, tuple(basis), factors, gen_values)


# --------------------------------------------------------------------------
# restriction / inflation


def restriction1(chi: Cochain1, sub: Subgroup, sub_group: Optional[FiniteGroup] = None) -> Cochain1:
    if sub.parent is not chi.group:
        raise ValueError("subgroup belongs to a different group")
    tgrp = sub_group if sub_group is not None else subgroup_as_group(sub)
    return Cochain1(tgrp, chi.modulus, chi.values[list(sub.members)])


def restriction2(c: Cochain2, sub: Subgroup, sub_group: Optional[FiniteGroup] = None) -> Cochain2:
    if sub.parent is not c.group:
        raise ValueError("subgroup belongs to a different group")
    tgrp = sub_group if sub_group is not None else subgroup_as_group(sub)
    mem = list(sub.members)
    return Cochain2(tgrp, c.modulus, c.values[np.ix_(mem, mem)])


def inflation1(chi: Cochain1, data: QuotientData) -> Cochain1:
    if not _same_group(chi.group, data.quotient):
        raise ValueError("cochain does not live on the quotient")
    proj = data.projection.images
    return Cochain1(data.projection.source, chi.modulus, chi.values[proj])


def inflation2(c: Cochain2, data: QuotientData) -> Cochain2:
    if not _same_group(c.group, data.quotient):
        raise ValueError("cochain does not live on the quotient")
    proj = data.projection.images
    return Cochain2(data.projection.source, c.modulus, c.values[np.ix_(proj, proj)])


# --------------------------------------------------------------------------
# invariant homs on a normal subgroup, and transgression


@dataclass(frozen=True, eq=False)
class InvariantH1:
    """Basis of the G-invariant homomorphisms T → Z/q.

    ``group`` is the subgroup as a standalone group; index i of it is
    ``sub.members[i]`` inside the parent.
    """

    sub: Subgroup
    group: FiniteGroup
    modulus: int
    basis: tuple[Cochain1, ...]
    invariant_factors: tuple[int, ...]
    _position: np.ndarray

    @property
    def order(self) -> int:
        n = 1
        for f in self.invariant_factors:
            n *= f
        return n

    def position(self, parent_element: int) -> int:
        pos = int(self._position[parent_element])
        if pos < 0:
            raise ValueError("element is not in the subgroup")
        return pos

    def value(self, psi: Cochain1, parent_element: int) -> int:
        return int(psi.values[self.position(parent_element)])

    def coordinates_of(self, psi: Cochain1) -> tuple[int, ...]:
        gens = _solver_gens(self.group)
        target = psi.values[list(gens)]
        if not self.basis:
            if target.any():
                raise ValueError("nonzero hom in a trivial invariant module")
            return ()
        mat = np.array([b.values[list(gens)] for b in self.basis], dtype=np.int64)
        sol = solve(ZqMatrix(mat.T, self.modulus), target)
        if sol is None:
            raise ValueError("hom is not in the invariant span")
        return tuple(int(x) % f for x, f in zip(sol, self.invariant_factors))

    def element(self, coords: Sequence[int]) -> Cochain1:
        acc = np.zeros(self.group.order, dtype=np.int64)
        for x, psi in zip(coords, self.basis):
            acc += int(x) * psi.values
        return Cochain1(self.group, self.modulus, acc)

    def enumerate_elements(self) -> Iterable[Cochain1]:
        for coords in itertools.product(*(range(f) for f in self.invariant_factors)):
            yield self.element(coords)


def _conjugation_permutations(group: FiniteGroup, sub: Subgroup) -> list[np.ndarray]:
    """For each parent generator g, the permutation t ↦ position(g⁻¹tg) of sub."""
    mem = np.array(sub.members, dtype=np.int64)
    pos = np.full(group.order, -1, dtype=np.int64)
    pos[mem] = np.arange(mem.size)
    perms = []
    for g in group.generators:
        conj = group.table[group.table[group.inverses[g], mem], g]
        if (pos[conj] < 0).any():
            raise ValueError("subgroup is not normal")
        perms.append(pos[conj])
    return perms


def invariants_h1(group: FiniteGroup, sub: Subgroup, q: int) -> InvariantH1:
    """G-invariant homomorphisms ψ: T → Z/q, i.e. ψ(g⁻¹tg) = ψ(t)."""
    if not sub.is_normal():
        raise ValueError("invariants need a normal subgroup")
    tgrp = subgroup_as_group(sub)
    full = h1(tgrp, q)
    mem = np.array(sub.members, dtype=np.int64)
    pos = np.full(group.order, -1, dtype=np.int64)
    pos[mem] = np.arange(mem.size)
    perms = _conjugation_permutations(group, sub)
    m = len(full.basis)
    if m == 0:
        return InvariantH1(sub, tgrp, q, (), (), pos)
    vals = np.array([chi.values for chi in full.basis], dtype=np.int64)
    rows = []
    for perm in perms:
        rows.append((vals[:, perm] - vals).T % q)
    constraint = np.unique(np.concatenate(rows, axis=0), axis=0)
    ker = kernel(ZqMatrix(constraint, q)).entries
    inv_rows = (ker @ vals) % q
    basis_rows, factors = _canonical_span_basis(inv_rows, q)
    basis = []
    for row in basis_rows:
        psi = Cochain1(tgrp, q, row)
        assert psi.is_cocycle()
        for perm in perms:
            assert np.array_equal(psi.values[perm], psi.values), "invariance violated"
        basis.append(psi)
    return InvariantH1(sub, tgrp, q, tuple(basis), factors, pos)


def transgression(
    group: FiniteGroup,
    sub: Subgroup,
    psi: Cochain1,
    q: int,
    data: Optional[QuotientData] = None,
    section: Optional[Sequence[int]] = None,
    require_level2: bool = True,
) -> Cochain2:
    """The factor-set image of an invariant hom ψ on T ≤ G^(2) normal.

    With a set section s of G → G/T fixed by s(1̄) = 1, the output is
    c(x̄, ȳ) = ψ(s(x̄)·s(ȳ)·s(x̄ȳ)⁻¹) on the quotient.  The sign convention
    (no global minus) is pinned by the dual-basis requirements downstream.
    """
    if require_level2:
        series = q_central_series(group, q)
        level2 = set(series.term(2).members)
        if not set(sub.members) <= level2:
            raise ValueError("transgression needs T inside the level-2 term")
    if psi.modulus != q:
        raise ValueError("modulus mismatch")
    if psi.group.order != len(sub.members):
        raise ValueError("hom does not live on the subgroup")
    _require_cocycle1(psi)
    for perm in _conjugation_permutations(group, sub):
        if not np.array_equal(psi.values[perm], psi.values):
            raise ValueError("hom is not conjugation-invariant")
    if data is None:
        data = quotient(group, sub)
    mem = np.array(sub.members, dtype=np.int64)
    pos = np.full(group.order, -1, dtype=np.int64)
    pos[mem] = np.arange(mem.size)
    if section is None:
        sec = data.coset_reps.copy()
    else:
        sec = np.asarray(section, dtype=np.int64).copy()
        if sec.shape != (data.quotient.order,):
            raise ValueError("section must pick one representative per coset")
        if (data.projection.images[sec] != np.arange(data.quotient.order)).any():
            raise ValueError("section does not split the projection")
    sec[data.projection(group.identity)] = group.identity
    prod = group.table[np.ix_(sec, sec)]
    back = group.inverses[sec[data.quotient.table]]
    factor = group.table[prod, back]
    if (pos[factor] < 0).any():
        raise AssertionError("factor set escaped the subgroup")
    out = Cochain2(data.quotient, q, psi.values[pos[factor]])
    if not out.is_cocycle():
        raise ValueError("factor set is not a cocycle (hom not invariant enough)")
    return out


# --------------------------------------------------------------------------
# H² via the reduced-variable cocycle solver


def _h2_linear_forms(group: FiniteGroup, q: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """L[x, y, :] with c(x, y) = L[x,y]·v for the variables v = c(·, s∈gens)."""
    gens = _solver_gens(group)
    n = group.order
    d = len(gens)
    nv = n * d
    L = np.zeros((n, n, nv), dtype=np.int64)
    xs = np.arange(n)
    seen = np.zeros(n, dtype=bool)
    seen[group.identity] = True
    for k, s in enumerate(gens):
        if not seen[s]:
            L[xs, s, xs * d + k] = 1
            seen[s] = True
    for w, y, k in _bfs_tree(group.table, group.identity, gens):
        if seen[w]:
            continue
        seen[w] = True
        s = gens[k]
        xy = group.table[:, y]
        L[:, w, :] = L[:, y, :]
        L[xs, w, xy * d + k] += 1
        L[:, w, y * d + k] -= 1
        L[:, w, :] %= q
    return L, gens


def _h2_constraint_rows(group: FiniteGroup, q: int, L: np.ndarray, gens: tuple[int, ...]) -> np.ndarray:
    n = group.order
    d = len(gens)
    nv = n * d
    xs = np.arange(n)
    blocks = [np.eye(nv, dtype=np.int64)[[group.identity * d + k for k in range(d)]]]
    for k, s in enumerate(gens):
        ws = group.table[:, s]
        for y in range(n):
            w = int(ws[y])
            rows = (L[:, w, :] - L[:, y, :]).copy()
            rows[:, y * d + k] += 1
            xy = group.table[:, y]
            rows[xs, xy * d + k] -= 1
            blocks.append(rows % q)
    stacked = np.unique(np.concatenate(blocks, axis=0), axis=0)
    return stacked[stacked.any(axis=1)]


def _coboundary_rows(group: FiniteGroup, q: int, gens: tuple[int, ...]) -> np.ndarray:
    """v-space vectors of ∂δ_g for g ≠ 1 (the coboundary lattice)."""
    n = group.order
    d = len(gens)
    garr = np.arange(n)
    rows = np.zeros((n, n, d), dtype=np.int64)
    for k, s in enumerate(gens):
        xs_col = group.table[:, s]
        rows[:, :, k] = (garr[:, None] == garr[None, :]).astype(np.int64)
        rows[s, :, k] += 1
        rows[:, :, k] -= (garr[:, None] == xs_col[None, :]).astype(np.int64)
    flat = rows.reshape(n, n * d) % q
    return np.delete(flat, group.identity, axis=0)


@dataclass(frozen=True, eq=False)
class H2Space:
    """H²(G, Z/q) with cocycle-representative basis and coordinates.

    Internally a cocycle is identified with its restriction to the pairs
    (x, s) over the solver generators ("v-vector"); that restriction is
    injective on cocycles and spans are compared there.
    """

    group: FiniteGroup
    modulus: int
    gens: tuple[int, ...]
    basis: tuple[Cochain2, ...]
    invariant_factors: tuple[int, ...]
    _forms: np.ndarray
    _basis_v: np.ndarray
    _cob_v: np.ndarray
    _cob_howell: HowellForm

    @property
    def order(self) -> int:
        n = 1
        for f in self.invariant_factors:
            n *= f
        return n

    def v_vector(self, c: Cochain2) -> np.ndarray:
        cols = list(self.gens)
        return c.values[:, cols].reshape(-1).copy()

    def coordinates_of(self, c: Cochain2) -> tuple[int, ...]:
        """Class coordinates in the basis (reduced mod the cyclic orders)."""
        if not _same_group(c.group, self.group) or c.modulus != self.modulus:
            raise ValueError("cochain belongs to a different carrier")
        _require_cocycle2(c)
        stack = np.concatenate([self._basis_v, self._cob_v], axis=0)
        sol = solve(ZqMatrix(stack.T, self.modulus), self.v_vector(c))
        if sol is None:
            raise AssertionError("cocycle not in the computed span (solver bug)")
        m = len(self.basis)
        return tuple(int(x) % f for x, f in zip(sol[:m], self.invariant_factors))

    def representative(self, coords: Sequence[int]) -> Cochain2:
        acc = np.zeros((self.group.order, self.group.order), dtype=np.int64)
        for x, c in zip(coords, self.basis):
            acc += int(x) * c.values
        return Cochain2(self.group, self.modulus, acc)

    def same_class(self, a: Cochain2, b: Cochain2) -> bool:
        return self.coordinates_of(a) == self.coordinates_of(b)

    def is_zero_class(self, c: Cochain2) -> bool:
        return not any(self.coordinates_of(c))

    def enumerate_coordinates(self) -> Iterable[tuple[int, ...]]:
        yield from itertools.product(*(range(f) for f in self.invariant_factors))


def h2(group: FiniteGroup, q: int, cap: int = H2_CAP) -> H2Space:
    """Full H²(G, Z/q) by the reduced-variable solver.  Guarded by ``cap``."""
    n = group.order
    if n > cap:
        raise ValueError(f"group order {n} exceeds the H² solver cap {cap}")
    L, gens = _h2_linear_forms(group, q)
    constraints = _h2_constraint_rows(group, q, L, gens)
    if constraints.size:
        zrows = kernel(ZqMatrix(constraints, q)).entries
    else:
        zrows = np.eye(n * len(gens), dtype=np.int64)
    cob = _coboundary_rows(group, q, gens)
    cob_h = howell_form(ZqMatrix(cob, q))
    # relations of the quotient Z²/B² in terms of the kernel generators
    stacked = np.concatenate([zrows, cob], axis=0)
    left = kernel(ZqMatrix(stacked.T, q)).entries
    mu = left[:, : zrows.shape[0]]
    pres = AbGroupPresentation.from_relations(zrows.shape[0], q, mu)
    basis_v = (pres.basis_images.entries @ zrows) % q
    flat_forms = L.reshape(n * n, -1)
    basis = []
    for row in basis_v:
        c = Cochain2(group, q, (flat_forms @ row).reshape(n, n))
        assert c.is_cocycle()
        basis.append(c)
    p, _ = factor_prime_power(q)
    for c, f in zip(basis, pres.invariant_factors):
        sub = c.scale(f // p)
        assert is_coboundary(sub) is None, "basis class has smaller order than claimed"
    space = H2Space(
        group=group,
        modulus=q,
        gens=gens,
        basis=tuple(basis),
        invariant_factors=pres.invariant_factors,
        _forms=flat_forms,
        _basis_v=basis_v.reshape(len(basis), -1) if basis else np.zeros((0, n * len(gens)), dtype=np.int64),
        _cob_v=cob,
        _cob_howell=cob_h,
    )
    expected = row_span_size(howell_form(ZqMatrix(stacked, q))) // row_span_size(cob_h)
    assert space.order == expected, "presentation order disagrees with span count"
    return space


@dataclass(frozen=True, eq=False)
class H2Subspace:
    """A submodule of H², stored as v-vector spans with coboundaries folded in."""

    space: H2Space
    gens: tuple[Cochain2, ...]
    _span: HowellForm

    @property
    def order(self) -> int:
        return row_span_size(self._span) // row_span_size(self.space._cob_howell)

    def contains(self, c: Cochain2) -> bool:
        _require_cocycle2(c)
        return row_span_contains(self._span, self.space.v_vector(c))

    def coordinate_members(self) -> frozenset[tuple[int, ...]]:
        """All class coordinates lying in this subspace (enumerates the span)."""
        out = set()
        factors = [range(f) for f in (self.space.invariant_factors or ())]
        for coords in itertools.product(*factors):
            if self.contains(self.space.representative(coords)):
                out.add(coords)
        return frozenset(out)


def span_of_classes(space: H2Space, cochains: Sequence[Cochain2]) -> H2Subspace:
    rows = [space.v_vector(c) for c in cochains]
    for c in cochains:
        _require_cocycle2(c)
    stacked = np.concatenate([np.array(rows, dtype=np.int64).reshape(len(rows), -1), space._cob_v], axis=0) if rows else space._cob_v
    return H2Subspace(space, tuple(cochains), howell_form(ZqMatrix(stacked, space.modulus)))


def h2_dec(space: H2Space, h1space: Optional[H1Space] = None) -> H2Subspace:
    """Span of all cup products of degree-1 classes."""
    h1s = h1space if h1space is not None else h1(space.group, space.modulus)
    cups = [cup11(a, b) for a in h1s.basis for b in h1s.basis]
    return span_of_classes(space, cups)


def img_bockstein(space: H2Space, h1space: Optional[H1Space] = None) -> H2Subspace:
    h1s = h1space if h1space is not None else h1(space.group, space.modulus)
    return span_of_classes(space, [bockstein(chi) for chi in h1s.basis])


# --------------------------------------------------------------------------
# symbolic H² of elementary free modules (Z/q)^d


@dataclass(frozen=True, eq=False)
class SymbolicElementaryH2:
    """H²((Z/q)^d) as a free Z/q-module on β(χ_i) and χ_i∪χ_j (i < j).

    Coordinates: slots 0..d-1 are the Bockstein basis classes, the rest are
    the cup classes in lexicographic pair order.
    """

    d: int
    q: int

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.d) for j in range(i + 1, self.d)]

    @property
    def rank(self) -> int:
        return self.d + len(self.pairs)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f"b{i + 1}" for i in range(self.d)) + tuple(
            f"x{i + 1}^x{j + 1}" for i, j in self.pairs
        )

    def cup_coords(self, a: Sequence[int], b: Sequence[int]) -> np.ndarray:
        """Class of (Σa_iχ_i) ∪ (Σb_iχ_i)."""
        p, _ = factor_prime_power(self.q)
        delta = 2 if p == 2 else 1
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros(self.rank, dtype=np.int64)
        out[: self.d] = (self.q // delta) * a * b
        for t, (i, j) in enumerate(self.pairs):
            out[self.d + t] = a[i] * b[j] - a[j] * b[i]
        return out % self.q

    def bockstein_coords(self, a: Sequence[int]) -> np.ndarray:
        out = np.zeros(self.rank, dtype=np.int64)
        out[: self.d] = np.asarray(a, dtype=np.int64)
        return out % self.q

    def dec_rows(self) -> np.ndarray:
        """Spanning rows of the decomposable part in symbolic coordinates."""
        rows = [self.cup_coords(np.eye(self.d, dtype=np.int64)[i], np.eye(self.d, dtype=np.int64)[j])
                for i in range(self.d) for j in range(self.d)]
        return np.array(rows, dtype=np.int64) % self.q

    def dec_order(self) -> int:
        return row_span_size(howell_form(ZqMatrix(self.dec_rows(), self.q)))


def symbolic_h2_elementary(d: int, q: int) -> SymbolicElementaryH2:
    factor_prime_power(q)
    if d < 1:
        raise ValueError("need at least one generator")
    return SymbolicElementaryH2(d, q)


# --------------------------------------------------------------------------
# central extensions


@dataclass(frozen=True, eq=False)
class CentralExtensionSpec:
    """A central extension 0 → Z/q → E → Q → 1 built from a factor set."""

    base: FiniteGroup
    modulus: int
    cocycle: Cochain2
    total: FiniteGroup
    embed: np.ndarray
    projection: GroupHom
    section: np.ndarray


def extension_from_class(base: FiniteGroup, c: Cochain2) -> CentralExtensionSpec:
    """The group on Z/q × Q with (a,x)(b,y) = (a+b+c(x,y), xy)."""
    if not _same_group(c.group, base):
        raise ValueError("cocycle does not live on the base group")
    _require_cocycle2(c)
    q = c.modulus
    m = base.order
    n = q * m
    idx = np.arange(n, dtype=np.int64)
    a_part, x_part = idx // m, idx % m
    av = a_part[:, None] + a_part[None, :] + c.values[np.ix_(x_part, x_part)]
    table = (av % q) * m + base.table[np.ix_(x_part, x_part)]
    gens = [int(x) for x in base.generators] + [m * 1 + base.identity if q > 1 else base.identity]
    gen_names = [base.labels[g] for g in base.generators] + ["z"]
    total = FiniteGroup.from_table(
        table, generators=gens, gen_names=gen_names, name=f"ext({base.name})"
    )
    embed = (np.arange(q, dtype=np.int64) * m) + base.identity
    proj = GroupHom(total, base, x_part.copy())
    section = np.arange(m, dtype=np.int64)
    # the fiber must be central
    fiber = embed[1] if q > 1 else embed[0]
    assert np.array_equal(table[fiber, :], table[:, fiber]), "fiber is not central"
    assert set(proj.kernel().members) == {int(e) for e in embed}
    return CentralExtensionSpec(base, q, c, total, embed, proj, section)


def class_from_extension(
    total: FiniteGroup,
    embed: Sequence[int],
    projection: GroupHom,
    q: int,
    section: Optional[Sequence[int]] = None,
) -> Cochain2:
    """Factor-set cocycle of a central extension with the given (or minimal) section."""
    emb = np.asarray(embed, dtype=np.int64)
    if emb.shape != (q,):
        raise ValueError("embedding must list the images of 0..q-1")
    if projection.source is not total:
        raise ValueError("projection must start at the total group")
    base = projection.target
    if not projection.is_surjective():
        raise ValueError("projection must be onto")
    if set(projection.kernel().members) != {int(e) for e in emb}:
        raise ValueError("kernel of the projection must be the embedded Z/q")
    for a in range(q):
        for b in range(q):
            if total.mul(int(emb[a]), int(emb[b])) != int(emb[(a + b) % q]):
                raise ValueError("embedding is not a homomorphism from Z/q")
    ge = int(emb[1 % q])
    if not np.array_equal(total.table[ge, :], total.table[:, ge]):
        raise ValueError("embedded subgroup is not central")
    if section is None:
        sec = np.full(base.order, -1, dtype=np.int64)
        for x in range(total.order - 1, -1, -1):
            sec[projection(x)] = x
    else:
        sec = np.asarray(section, dtype=np.int64).copy()
        if (projection.images[sec] != np.arange(base.order)).any():
            raise ValueError("section does not split the projection")
    sec[projection(total.identity)] = total.identity
    back = np.full(total.order, -1, dtype=np.int64)
    back[emb] = np.arange(q)
    prod = total.table[np.ix_(sec, sec)]
    factor = total.table[prod, total.inverses[sec[base.table]]]
    vals = back[factor]
    if (vals < 0).any():
        raise ValueError("factor set escaped the embedded kernel")
    out = Cochain2(base, q, vals)
    _require_cocycle2(out)
    return out


def class_of_spec(spec: CentralExtensionSpec) -> Cochain2:
    return class_from_extension(spec.total, spec.embed, spec.projection, spec.modulus, spec.section)


# --------------------------------------------------------------------------
# tensor-power quotients (quadratic hull and friends)


def _module_elements(factors: Sequence[int]) -> np.ndarray:
    grids = np.meshgrid(*(np.arange(f) for f in factors), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1) if factors else np.zeros((1, 0), dtype=np.int64)


def tensor_kill_rows(
    factors: Sequence[int],
    q: int,
    r: int,
    t: int,
    alpha_is_zero: Callable[[tuple[np.ndarray, ...]], bool],
) -> np.ndarray:
    """Rows spanning the pure tensors with an α-killed t-subsequence.

    The ambient module is the r-th tensor power of ⊕ Z/f_k; a pure tensor
    v₁⊗···⊗v_r contributes iff α(v_{j₁},…,v_{j_t}) = 0 for some
    j₁ < ··· < j_t.  Degree cap r ≤ 3.
    """
    m = len(factors)
    if r > 3:
        raise ValueError("tensor degree capped at 3")
    if r < 1:
        raise ValueError("tensor degree must be positive")
    if r < t:
        return np.zeros((0, m**r), dtype=np.int64)
    elems = _module_elements(factors)
    ne = elems.shape[0]
    # cache α on all t-tuples of module elements
    killed = np.zeros((ne,) * t, dtype=bool)
    for tup in itertools.product(range(ne), repeat=t):
        killed[tup] = alpha_is_zero(tuple(elems[i] for i in tup))
    rows = []
    for tup in itertools.product(range(ne), repeat=r):
        hit = any(
            killed[tuple(tup[j] for j in sub)]
            for sub in itertools.combinations(range(r), t)
        )
        if not hit:
            continue
        vec = elems[tup[0]]
        for j in tup[1:]:
            vec = np.multiply.outer(vec, elems[j]).reshape(-1)
        rows.append(vec % q)
    if not rows:
        return np.zeros((0, m**r), dtype=np.int64)
    return np.unique(np.array(rows, dtype=np.int64), axis=0)


def tensor_quotient(factors: Sequence[int], q: int, r: int, kill_rows: np.ndarray) -> AbGroupPresentation:
    """Presentation of (⊕Z/f_k)^{⊗r} / span(kill_rows)."""
    m = len(factors)
    ngens = m**r
    rel_rows = list(np.asarray(kill_rows, dtype=np.int64).reshape(-1, ngens))
    # tensor relations: the generator e_{k₁}⊗···⊗e_{k_r} has order min f_{k_i}
    for tup in itertools.product(range(m), repeat=r):
        f = min(factors[k] for k in tup)
        if f < q:
            row = np.zeros(ngens, dtype=np.int64)
            flat = 0
            for k in tup:
                flat = flat * m + k
            row[flat] = f
            rel_rows.append(row)
    return AbGroupPresentation.from_relations(ngens, q, rel_rows)


@dataclass(frozen=True, eq=False)
class HatRing:
    """Tensor algebra of H¹ modulo vanishing-cup pure tensors, by degree."""

    group: FiniteGroup
    modulus: int
    degrees: dict[int, AbGroupPresentation]
    dec_order: int

    @property
    def quadratic2(self) -> bool:
        """Degree-2 faithfulness: the cup epimorphism is injective there."""
        return self.degrees[2].order == self.dec_order


def hat_ring(
    group: FiniteGroup,
    q: int,
    max_degree: int = 2,
    h1space: Optional[H1Space] = None,
    space: Optional[H2Space] = None,
) -> HatRing:
    if max_degree > 3:
        raise ValueError("tensor degree capped at 3")
    if max_degree < 2:
        raise ValueError("need at least degree 2 for the quadraticity verdict")
    h1s = h1space if h1space is not None else h1(group, q)
    sp = space if space is not None else h2(group, q)
    m = len(h1s.basis)
    nfac = len(sp.invariant_factors)
    cup_tbl = np.zeros((m, m, nfac), dtype=np.int64)
    for i, a in enumerate(h1s.basis):
        for j, b in enumerate(h1s.basis):
            cup_tbl[i, j] = sp.coordinates_of(cup11(a, b))
    h2f = np.array(sp.invariant_factors, dtype=np.int64)

    def cup_is_zero(pair: tuple[np.ndarray, ...]) -> bool:
        a, b = pair
        if m == 0:
            return True
        acc = np.einsum("i,j,ijk->k", a, b, cup_tbl)
        return not (acc % h2f).any() if h2f.size else True

    degrees = {}
    for r in range(1, max_degree + 1):
        rows = tensor_kill_rows(h1s.invariant_factors, q, r, 2, cup_is_zero)
        degrees[r] = tensor_quotient(h1s.invariant_factors, q, r, rows)
    dec = h2_dec(sp, h1s)
    return HatRing(group, q, degrees, dec.order)


# --------------------------------------------------------------------------
# five-term exact sequence


@dataclass(frozen=True, eq=False)
class FiveTermReport:
    group: FiniteGroup
    sub: Subgroup
    modulus: int
    nodes: tuple[tuple[str, bool, str], ...]

    @property
    def exact(self) -> bool:
        return all(ok for _, ok, _ in self.nodes)


def _span_equal(rows_a: np.ndarray, rows_b: np.ndarray, q: int, width: int) -> bool:
    if width == 0:
        return True
    a = np.asarray(rows_a, dtype=np.int64).reshape(-1, width)
    b = np.asarray(rows_b, dtype=np.int64).reshape(-1, width)
    ha = howell_form(ZqMatrix(a, q)).matrix.entries
    hb = howell_form(ZqMatrix(b, q)).matrix.entries
    return ha.shape == hb.shape and bool(np.array_equal(ha, hb))


def five_term_check(
    group: FiniteGroup, sub: Subgroup, q: int, cap: int = H2_CAP, require_level2: bool = True
) -> FiveTermReport:
    """Exactness of 0 → H¹(G/T) → H¹(G) → H¹(T)^G → H²(G/T) → H²(G).

    The last node tests ker(H²(G/T) → H²(G)) = img(trg) by running coboundary
    tests upstairs, so it works even when |G| exceeds the H² cap.
    """
    if require_level2:
        series = q_central_series(group, q)
        if not set(sub.members) <= set(series.term(2).members):
            raise ValueError("five-term check needs T inside the level-2 term")
    data = quotient(group, sub)
    quot = data.quotient
    if quot.order > cap:
        raise ValueError("quotient exceeds the H² cap")
    h1_quot = h1(quot, q)
    h1_big = h1(group, q)
    inv = invariants_h1(group, sub, q)
    nodes = []

    # node 1: inflation H¹(G/T) → H¹(G) is injective
    gens_big = _solver_gens(group)
    infl_rows = np.array(
        [inflation1(chi, data).values[list(gens_big)] for chi in h1_quot.basis],
        dtype=np.int64,
    ).reshape(len(h1_quot.basis), len(gens_big))
    ok1 = row_span_size(howell_form(ZqMatrix(infl_rows, q))) == h1_quot.order
    nodes.append(("inflation-injective", ok1, f"|H1(Q)| = {h1_quot.order}"))

    # node 2: ker(res: H¹(G) → H¹(T)) = img(inf)
    tgens = _solver_gens(inv.group)
    tmem = [inv.sub.members[g] for g in tgens]  # positions back to parent elements
    res_mat = np.array(
        [[chi.values[pe] for pe in tmem] for chi in h1_big.basis], dtype=np.int64
    ).reshape(len(h1_big.basis), len(tgens))
    kerc = kernel(ZqMatrix(res_mat.T, q)).entries if h1_big.basis else np.zeros((0, 0), dtype=np.int64)
    big_vals = np.array(
        [chi.values[list(gens_big)] for chi in h1_big.basis], dtype=np.int64
    ).reshape(len(h1_big.basis), len(gens_big))
    ker_rows = (kerc @ big_vals) % q if kerc.size else np.zeros((0, len(gens_big)), dtype=np.int64)
    ok2 = _span_equal(ker_rows, infl_rows, q, len(gens_big))
    nodes.append(("kernel-res-equals-image-inf", ok2, f"ker rank rows {ker_rows.shape[0]}"))

    # node 3: ker(trg: H¹(T)^G → H²(G/T)) = img(res)
    h2_quot = h2(quot, q)
    trg_list = [
        transgression(group, sub, psi, q, data=data, require_level2=require_level2)
        for psi in inv.basis
    ]
    if inv.basis:
        stacked = np.concatenate(
            [
                np.array([h2_quot.v_vector(t) for t in trg_list], dtype=np.int64),
                h2_quot._cob_v,
            ],
            axis=0,
        )
        left = kernel(ZqMatrix(stacked.T, q)).entries
        mu = left[:, : len(inv.basis)]
        tvals_width = len(tgens)
        inv_vals = np.array(
            [psi.values[list(tgens)] for psi in inv.basis], dtype=np.int64
        ).reshape(len(inv.basis), tvals_width)
        ker_trg_rows = (mu @ inv_vals) % q
    else:
        ker_trg_rows = np.zeros((0, len(tgens)), dtype=np.int64)
    res_rows = np.array(
        [[chi.values[pe] for pe in tmem] for chi in h1_big.basis], dtype=np.int64
    ).reshape(len(h1_big.basis), len(tgens))
    ok3 = _span_equal(ker_trg_rows, res_rows, q, len(tgens))
    nodes.append(("kernel-trg-equals-image-res", ok3, f"{len(trg_list)} transgressed homs"))

    # node 4: ker(inf: H²(G/T) → H²(G)) = img(trg)
    killed = set()
    for coords in h2_quot.enumerate_coordinates():
        rep = h2_quot.representative(coords)
        if is_coboundary(inflation2(rep, data)) is not None:
            killed.add(coords)
    image = set()
    ranges = [range(f) for f in (q,) * len(trg_list)]
    for mix in itertools.product(*ranges):
        acc = zero2(quot, q)
        for x, t in zip(mix, trg_list):
            acc = acc + t.scale(x)
        image.add(h2_quot.coordinates_of(acc))
    ok4 = killed == image
    nodes.append(
        ("kernel-inf2-equals-image-trg", ok4, f"kernel size {len(killed)}, image size {len(image)}")
    )
    return FiveTermReport(group, sub, q, tuple(nodes))
