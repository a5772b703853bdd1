"""Dualities between central subquotients and degree-two cohomology.

The objects here pair a finite p-group ``G`` (coefficients Z/q, q = p**s)
with the second term ``T`` of its descending q-central series and a chosen
normal subgroup ``T₀`` between ``T^q[T,G]`` and ``T``.  A submodule ``A`` of
H²(G/T) is *dual* to the pair when six equivalent conditions hold — kernel
matching, exactness through the coefficient module, a perfect substitution
pairing on T/T₀, an annihilator identity, and an intersection formula over
lifted homomorphisms into central extensions.  The triple kinds bundled as
:class:`DualityTriple` fix the standard choices: cup products only
(``dec-cup``), Bocksteins plus cups (``bock-cup``), and Bocksteins only
(``bock``).

Everything is verified exactly over Z/q linear algebra; no floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .cohomology import (
    Cochain1,
    Cochain2,
    H1Space,
    H2Space,
    H2Subspace,
    CentralExtensionSpec,
    InvariantH1,
    bockstein,
    cup11,
    extension_from_class,
    h1,
    h2,
    h2_dec,
    img_bockstein,
    inflation2,
    invariants_h1,
    is_coboundary,
    restriction2,
    span_of_classes,
    symbolic_h2_elementary,
    tensor_kill_rows,
    tensor_quotient,
    transgression,
)
from .cohomology import _canonical_span_basis, _coboundary_rows, _solver_gens
from .freemodel import FreeLevel3Model, canonical_basis, element_of, free_level3
from .groups import (
    FiniteGroup,
    GroupHom,
    QuotientData,
    Subgroup,
    commutator_subgroup,
    direct_product,
    element_orders,
    enumerate_homs,
    is_isomorphic,
    normal_subgroups_within,
    preset,
    q_central_series,
    quotient,
    subgroup_as_group,
    subgroup_closure,
    trivial_subgroup,
    whole_group,
)
from .groups import _bfs_tree, _extend_gen_images, _is_multiplicative
from .zqlin import (
    AbGroupPresentation,
    PairingReport,
    ZqMatrix,
    factor_prime_power,
    howell_form,
    kernel,
    pairing_perfection,
    row_span_contains,
    row_span_size,
    solve,
)

# order cap for the groups on which inflation kernels are computed directly;
# beyond it the kernel is taken toward G/T₀ instead (reported as substituted)
INFLATION_CAP = 1024
# cap on the brute-force searches (twist class, lift assignments, relations)
SEARCH_CAP = 4096

TRIPLE_KINDS = ("dec-cup", "bock-cup", "bock")


# --------------------------------------------------------------------------
# subgroups of the filtration


def lower3_subgroup(group: FiniteGroup, q: int) -> Subgroup:
    """The subgroup generated by (δq)-th powers and [T, G], T the level-2 term.

    δ is 2 for p = 2 and 1 otherwise; the level-3 series term always sits
    inside this subgroup, with equality when q = 2.
    """
    return q_central_series(group, q).lower3


def power_commutator_subgroup(group: FiniteGroup, m: int) -> Subgroup:
    """The subgroup generated by all m-th powers together with [G, G]."""
    seeds = [group.power(g, m) for g in group.elements()]
    seeds.extend(commutator_subgroup(group, whole_group(group), whole_group(group)).members)
    return subgroup_closure(group, seeds)


# --------------------------------------------------------------------------
# triple kinds


@dataclass(frozen=True)
class DualityTriple:
    """One of the three standard (T, T₀, A, α) assignments.

    ``top`` is always the level-2 series term; ``floor`` and the coefficient
    submodule vary with the kind, as does the set of tensor degrees on which
    α acts nontrivially.
    """

    kind: str

    @property
    def active_degrees(self) -> tuple[int, ...]:
        return {"dec-cup": (2,), "bock-cup": (1, 2), "bock": (1,)}[self.kind]

    def top(self, group: FiniteGroup, q: int) -> Subgroup:
        return q_central_series(group, q).term(2)

    def floor(self, group: FiniteGroup, q: int) -> Subgroup:
        if self.kind == "dec-cup":
            return lower3_subgroup(group, q)
        if self.kind == "bock-cup":
            return q_central_series(group, q).term(3)
        return power_commutator_subgroup(group, q * q)

    def alpha_image(self, space: H2Space, h1space: Optional[H1Space] = None) -> H2Subspace:
        """The submodule A(Q) of H²(Q) spanned by the α-values."""
        h1s = h1space if h1space is not None else h1(space.group, space.modulus)
        if self.kind == "dec-cup":
            return h2_dec(space, h1s)
        if self.kind == "bock":
            return img_bockstein(space, h1s)
        gens = [bockstein(chi) for chi in h1s.basis]
        gens.extend(cup11(a, b) for a in h1s.basis for b in h1s.basis)
        return span_of_classes(space, gens)

    def alpha_generator_classes(
        self, group: FiniteGroup, q: int, h1space: Optional[H1Space] = None
    ) -> tuple[Cochain2, ...]:
        """Cocycle generators of A(group) without solving H² of the group."""
        h1s = h1space if h1space is not None else h1(group, q)
        out: list[Cochain2] = []
        if self.kind in ("bock-cup", "bock"):
            out.extend(bockstein(chi) for chi in h1s.basis)
        if self.kind in ("dec-cup", "bock-cup"):
            out.extend(cup11(a, b) for a in h1s.basis for b in h1s.basis)
        return tuple(out)


def triple_of(kind: str) -> DualityTriple:
    if kind not in TRIPLE_KINDS:
        raise ValueError(f"unknown triple kind {kind!r}; expected one of {TRIPLE_KINDS}")
    return DualityTriple(kind)


# --------------------------------------------------------------------------
# Z/q span helpers


def _as_matrix(rows: np.ndarray, width: int, q: int) -> ZqMatrix:
    arr = np.asarray(rows, dtype=np.int64).reshape(-1, width) % q
    return ZqMatrix(arr, q)


def _rows_span_equal(a: np.ndarray, b: np.ndarray, width: int, q: int) -> bool:
    ha = howell_form(_as_matrix(a, width, q))
    hb = howell_form(_as_matrix(b, width, q))
    if row_span_size(ha) != row_span_size(hb):
        return False
    return all(row_span_contains(hb, row) for row in ha.matrix.entries)


def _span_intersection(a: np.ndarray, b: np.ndarray, width: int, q: int) -> np.ndarray:
    """Rows spanning (row span of a) ∩ (row span of b)."""
    a = np.asarray(a, dtype=np.int64).reshape(-1, width) % q
    b = np.asarray(b, dtype=np.int64).reshape(-1, width) % q
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((0, width), dtype=np.int64)
    stacked = np.concatenate([a, b], axis=0)
    combos = kernel(ZqMatrix(stacked.T, q)).entries
    inter = (combos[:, : a.shape[0]] @ a) % q
    return howell_form(_as_matrix(inter, width, q)).matrix.entries


def _combine1(group: FiniteGroup, q: int, parts: Sequence[Cochain1], coeffs: Sequence[int]) -> Cochain1:
    acc = np.zeros(group.order, dtype=np.int64)
    for x, chi in zip(coeffs, parts):
        acc += int(x) * chi.values
    return Cochain1(group, q, acc)


def _combine2(group: FiniteGroup, q: int, parts: Sequence[Cochain2], coeffs: Sequence[int]) -> Cochain2:
    acc = np.zeros((group.order, group.order), dtype=np.int64)
    for x, c in zip(coeffs, parts):
        acc += int(x) * c.values
    return Cochain2(group, q, acc)


def _combo_kernel(
    source: FiniteGroup,
    q: int,
    cochains: Sequence[Cochain2],
    images: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Coefficient rows y with Σ y_i·(pullback of cochains[i]) a coboundary.

    ``images`` are the values of a homomorphism from ``source`` into the
    carrier of the cochains (identity when omitted).  With the coboundary
    lattice of ``source`` folded in, the rows span the kernel of the induced
    map on classes exactly.
    """
    if source.order > INFLATION_CAP:
        raise ValueError(f"inflation kernel capped at source order {INFLATION_CAP}")
    k = len(cochains)
    if k == 0:
        return np.zeros((0, 0), dtype=np.int64)
    gens = _solver_gens(source)
    cob = _coboundary_rows(source, q, gens)
    if images is None:
        im = np.arange(source.order, dtype=np.int64)
    else:
        im = np.asarray(images, dtype=np.int64)
    cols = im[list(gens)]
    rows = np.array(
        [c.values[np.ix_(im, cols)].reshape(-1) for c in cochains], dtype=np.int64
    ) % q
    stacked = np.concatenate([rows, cob], axis=0)
    combos = kernel(ZqMatrix(stacked.T, q)).entries
    return combos[:, :k] % q


def _presentation(ngens: int, q: int, rows: np.ndarray) -> AbGroupPresentation:
    if ngens == 0:
        empty = ZqMatrix(np.zeros((0, 0), dtype=np.int64), q)
        return AbGroupPresentation(
            ngens=0,
            modulus=q,
            relations=empty,
            invariant_factors=(),
            basis_images=empty,
            _coordinate_map=empty,
        )
    return AbGroupPresentation.from_relations(ngens, q, _as_matrix(rows, ngens, q))


def _subspace_equal(a: H2Subspace, b: H2Subspace) -> bool:
    if row_span_size(a._span) != row_span_size(b._span):
        return False
    return all(row_span_contains(b._span, row) for row in a._span.matrix.entries)


def _subspace_contains(big: H2Subspace, small: H2Subspace) -> bool:
    return all(row_span_contains(big._span, row) for row in small._span.matrix.entries)


def h2_full(space: H2Space) -> H2Subspace:
    """The whole of H² as a subspace (identity coefficient submodule)."""
    return span_of_classes(space, list(space.basis))


def pullback1(chi: Cochain1, hom: GroupHom) -> Cochain1:
    if chi.group is not hom.target:
        raise ValueError("cochain does not live on the homomorphism target")
    return Cochain1(hom.source, chi.modulus, chi.values[hom.images])


def pullback2(c: Cochain2, hom: GroupHom) -> Cochain2:
    if c.group is not hom.target:
        raise ValueError("cochain does not live on the homomorphism target")
    return Cochain2(hom.source, c.modulus, c.values[np.ix_(hom.images, hom.images)])


# --------------------------------------------------------------------------
# the level-2 quotient as a free Z/q-module


@dataclass(frozen=True, eq=False)
class Level2Frame:
    """The quotient by the level-2 term, split as a free Z/q-module.

    ``basis`` lists quotient elements forming an independent generating set,
    ``chars`` the dual coordinate homomorphisms, and ``coords`` the full
    discrete-logarithm table (row per quotient element).  ``space`` is the
    solved H² of the quotient; ``symbolic`` the matching free coordinate
    module on Bockstein and cup slots.
    """

    group: FiniteGroup
    modulus: int
    data: QuotientData
    basis: tuple[int, ...]
    chars: tuple[Cochain1, ...]
    coords: np.ndarray
    space: H2Space
    symbolic: object
    _symbolic_v: np.ndarray
    _generator_classes: tuple[Cochain2, ...]

    @property
    def d(self) -> int:
        return len(self.basis)

    @property
    def quotient(self) -> FiniteGroup:
        return self.data.quotient

    def char_of(self, vec: Sequence[int]) -> Cochain1:
        vals = (self.coords @ (np.asarray(vec, dtype=np.int64) % self.modulus)) % self.modulus
        return Cochain1(self.quotient, self.modulus, vals)

    def kernel_subgroup(self, vecs: Sequence[Sequence[int]]) -> Subgroup:
        """Common kernel of the coordinate forms given by ``vecs``."""
        mask = np.ones(self.quotient.order, dtype=bool)
        for vec in vecs:
            vals = (self.coords @ (np.asarray(vec, dtype=np.int64))) % self.modulus
            mask &= vals == 0
        return Subgroup(self.quotient, tuple(int(x) for x in np.flatnonzero(mask)))

    def class_symbolic_coords(self, c: Cochain2) -> np.ndarray:
        """Coordinates of a class in the Bockstein/cup slot basis."""
        stacked = np.concatenate([self._symbolic_v, self.space._cob_v], axis=0)
        sol = solve(ZqMatrix(stacked.T, self.modulus), self.space.v_vector(c))
        if sol is None:
            raise AssertionError("class escaped the Bockstein/cup span")
        return sol[: self.symbolic.rank] % self.modulus

    def symbolic_rep(self, coords: Sequence[int]) -> Cochain2:
        return _combine2(self.quotient, self.modulus, self._generator_classes, coords)


def _power_products(group: FiniteGroup, gens: Sequence[int], q: int) -> tuple[np.ndarray, np.ndarray]:
    """All products Πg_i^{e_i} with 0 ≤ e_i < q, as (exponent rows, elements)."""
    if q ** len(gens) > SEARCH_CAP * 16:
        raise ValueError("power-product enumeration too large")
    exps = np.array(list(itertools.product(range(q), repeat=len(gens))), dtype=np.int64)
    elems = np.full(exps.shape[0], group.identity, dtype=np.int64)
    for j, g in enumerate(gens):
        powers = np.array([group.power(int(g), e) for e in range(q)], dtype=np.int64)
        elems = group.table[elems, powers[exps[:, j]]]
    return exps, elems


def level2_frame(
    group: FiniteGroup,
    q: int,
    preferred_parent: Sequence[int] = (),
    data: Optional[QuotientData] = None,
) -> Level2Frame:
    """Split G/T as (Z/q)^d and solve its cohomology.

    Raises ValueError when the quotient is not a free Z/q-module (no basis of
    order-q elements with q-fold closure jumps exists).
    """
    if data is None:
        data = quotient(group, q_central_series(group, q).term(2))
    Q = data.quotient
    if Q.order == 1:
        raise ValueError("level-2 quotient is trivial")
    orders = element_orders(Q)
    candidates: list[int] = [data.projection(int(g)) for g in preferred_parent]
    candidates.extend(Q.generators)
    candidates.extend(range(Q.order))
    basis: list[int] = []
    current = trivial_subgroup(Q)
    for x in candidates:
        if current.order == Q.order:
            break
        if int(orders[x]) != q or current.contains(int(x)):
            continue
        enlarged = subgroup_closure(Q, list(current.members) + [int(x)])
        if enlarged.order == current.order * q:
            basis.append(int(x))
            current = enlarged
    if current.order != Q.order:
        raise ValueError("level-2 quotient is not a free module over Z/q")
    d = len(basis)
    exps, elems = _power_products(Q, basis, q)
    if np.unique(elems).size != Q.order:
        raise AssertionError("basis products do not cover the quotient freely")
    coords = np.zeros((Q.order, d), dtype=np.int64)
    coords[elems] = exps
    chars = []
    for i in range(d):
        chi = Cochain1(Q, q, coords[:, i].copy())
        assert chi.is_cocycle()
        chars.append(chi)
    sym = symbolic_h2_elementary(d, q)
    gen_classes = [bockstein(chi) for chi in chars]
    gen_classes.extend(cup11(chars[i], chars[j]) for i, j in sym.pairs)
    space = h2(Q, q)
    sym_v = np.array([space.v_vector(c) for c in gen_classes], dtype=np.int64).reshape(
        len(gen_classes), -1
    )
    return Level2Frame(
        group=group,
        modulus=q,
        data=data,
        basis=tuple(basis),
        chars=tuple(chars),
        coords=coords,
        space=space,
        symbolic=sym,
        _symbolic_v=sym_v,
        _generator_classes=tuple(gen_classes),
    )


# --------------------------------------------------------------------------
# transgression solver


@dataclass(frozen=True, eq=False)
class TransgressionSolver:
    """Transgression images of the invariant homomorphisms on T, inverted.

    ``images[i]`` is the factor-set class on G/T of the i-th invariant basis
    homomorphism; ``preimage`` solves membership in that span modulo
    coboundaries.  On T inside the level-2 term the map is injective (the
    restriction of degree-1 classes of G to T vanishes), so preimages are
    unique as invariant homomorphisms.
    """

    group: FiniteGroup
    top: Subgroup
    modulus: int
    data: QuotientData
    invariants: InvariantH1
    images: tuple[Cochain2, ...]
    space: H2Space
    _image_v: np.ndarray

    def image_subspace(self) -> H2Subspace:
        return span_of_classes(self.space, list(self.images))

    def preimage(self, c: Cochain2) -> Optional[Cochain1]:
        stacked = np.concatenate([self._image_v, self.space._cob_v], axis=0)
        sol = solve(ZqMatrix(stacked.T, self.modulus), self.space.v_vector(c))
        if sol is None:
            return None
        coeffs = [
            int(x) % f for x, f in zip(sol, self.invariants.invariant_factors)
        ]
        return self.invariants.element(coeffs)


def transgression_solver(
    group: FiniteGroup,
    top: Subgroup,
    q: int,
    data: Optional[QuotientData] = None,
    space: Optional[H2Space] = None,
) -> TransgressionSolver:
    inv = invariants_h1(group, top, q)
    if data is None:
        data = quotient(group, top)
    if space is None:
        space = h2(data.quotient, q)
    images = tuple(transgression(group, top, psi, q, data=data) for psi in inv.basis)
    if images:
        image_v = np.array([space.v_vector(c) for c in images], dtype=np.int64)
    else:
        image_v = np.zeros((0, space._cob_v.shape[1]), dtype=np.int64)
    return TransgressionSolver(group, top, q, data, inv, images, space, image_v)


# --------------------------------------------------------------------------
# the two pairings


@dataclass(frozen=True, eq=False)
class CentralSubquotient:
    """T/T₀ as a Z/q-module with parent representatives for its generators."""

    group: FiniteGroup
    top: Subgroup
    floor: Subgroup
    modulus: int
    presentation: AbGroupPresentation
    reps: tuple[int, ...]


def central_subquotient(
    group: FiniteGroup, top: Subgroup, floor: Subgroup, q: int
) -> CentralSubquotient:
    """Present T/T₀ on quotient generators; needs T^q[T,G] ≤ T₀ ≤ T."""
    if not top.is_normal() or not floor.is_normal():
        raise ValueError("both subgroups must be normal")
    if not all(top.contains(m) for m in floor.members):
        raise ValueError("floor must sit inside the top subgroup")
    lower = subgroup_closure(
        group,
        [group.power(t, q) for t in top.members]
        + list(commutator_subgroup(group, top, whole_group(group)).members),
    )
    if not all(floor.contains(m) for m in lower.members):
        raise ValueError("floor must contain T^q[T,G]")
    tgrp = subgroup_as_group(top)
    pos = {int(m): i for i, m in enumerate(top.members)}
    floor_in_top = Subgroup(tgrp, tuple(pos[int(m)] for m in floor.members))
    qd = quotient(tgrp, floor_in_top)
    Q = qd.quotient
    if Q.order == 1:
        return CentralSubquotient(group, top, floor, q, _presentation(0, q, np.zeros((0, 0))), ())
    gens = list(Q.generators)
    exps, elems = _power_products(Q, gens, q)
    rel_rows = exps[elems == Q.identity]
    pres = _presentation(len(gens), q, rel_rows)
    reps = tuple(int(top.members[int(qd.coset_reps[g])]) for g in gens)
    return CentralSubquotient(group, top, floor, q, pres, reps)


@dataclass(frozen=True, eq=False)
class RestrictionKernel:
    """Invariant homomorphisms on T that vanish on T₀, canonically based."""

    invariants: InvariantH1
    basis: tuple[Cochain1, ...]
    invariant_factors: tuple[int, ...]
    coordinate_rows: np.ndarray

    @property
    def order(self) -> int:
        n = 1
        for f in self.invariant_factors:
            n *= f
        return n


def restriction_kernel(
    group: FiniteGroup,
    top: Subgroup,
    floor: Subgroup,
    q: int,
    invariants: Optional[InvariantH1] = None,
) -> RestrictionKernel:
    inv = invariants if invariants is not None else invariants_h1(group, top, q)
    k = len(inv.basis)
    if k == 0:
        return RestrictionKernel(inv, (), (), np.zeros((0, 0), dtype=np.int64))
    rows = np.array(
        [[inv.value(b, int(m)) for b in inv.basis] for m in floor.members],
        dtype=np.int64,
    )
    combos = kernel(ZqMatrix(rows, q)).entries % q
    vals = np.array([b.values for b in inv.basis], dtype=np.int64)
    value_rows = (combos @ vals) % q
    basis_rows, factors = _canonical_span_basis(value_rows, q)
    basis = tuple(Cochain1(inv.group, q, row.copy()) for row in basis_rows)
    if basis:
        coord_rows = np.array([inv.coordinates_of(b) for b in basis], dtype=np.int64)
    else:
        coord_rows = np.zeros((0, k), dtype=np.int64)
    return RestrictionKernel(inv, basis, factors, coord_rows)


@dataclass(frozen=True, eq=False)
class SubstitutionPairing:
    """(σT₀, ψ) ↦ ψ(σ) between T/T₀ and the restriction kernel."""

    module: CentralSubquotient
    kernel: RestrictionKernel
    report: PairingReport

    @property
    def perfect(self) -> bool:
        return self.report.perfect


def substitution_pairing(
    group: FiniteGroup,
    q: int,
    top: Subgroup,
    floor: Optional[Subgroup] = None,
) -> SubstitutionPairing:
    """The substitution pairing; ``floor`` defaults to T^q[T,G]."""
    if floor is None:
        floor = subgroup_closure(
            group,
            [group.power(t, q) for t in top.members]
            + list(commutator_subgroup(group, top, whole_group(group)).members),
        )
    module = central_subquotient(group, top, floor, q)
    ker = restriction_kernel(group, top, floor, q)
    table = np.array(
        [[ker.invariants.value(psi, rep) for psi in ker.basis] for rep in module.reps],
        dtype=np.int64,
    ).reshape(len(module.reps), len(ker.basis))
    right = _presentation(len(ker.basis), q, np.diag(np.array(ker.invariant_factors, dtype=np.int64)) if ker.basis else np.zeros((0, 0)))
    report = pairing_perfection(ZqMatrix(table, q), module.presentation, right)
    return SubstitutionPairing(module, ker, report)


@dataclass(frozen=True, eq=False)
class TransgressionPairing:
    """(σT₀, φ) ↦ (trg⁻¹φ)(σ) between T/T₀ and the inflation kernel of A.

    ``well_defined`` records whether every transgression preimage kills T₀;
    when it does not, the map is not a pairing on T/T₀ at all and ``perfect``
    is False regardless of the table.
    """

    module: CentralSubquotient
    classes: tuple[Cochain2, ...]
    preimages: tuple[Cochain1, ...]
    well_defined: bool
    substituted: bool
    report: PairingReport

    @property
    def perfect(self) -> bool:
        return self.well_defined and self.report.perfect


def _inflation_kernel_classes(
    group: FiniteGroup,
    q: int,
    floor: Subgroup,
    solver: TransgressionSolver,
    gens: Sequence[Cochain2],
) -> tuple[tuple[Cochain2, ...], bool]:
    """Canonical class generators of Ker(inf: span(gens) → H²(G)).

    Falls back to the kernel toward G/floor when the group exceeds the
    inflation cap (second return value reports the substitution).
    """
    space = solver.space
    substituted = group.order > INFLATION_CAP
    if not substituted:
        combos = _combo_kernel(group, q, list(gens), images=solver.data.projection.images)
    else:
        qd0 = quotient(group, floor)
        images = solver.data.projection.images[qd0.coset_reps]
        hom = GroupHom(qd0.quotient, space.group, images)
        combos = _combo_kernel(qd0.quotient, q, list(gens), images=hom.images)
    seen: set[tuple[int, ...]] = set()
    out: list[Cochain2] = []
    for row in combos:
        c = _combine2(space.group, q, list(gens), row)
        coords = space.coordinates_of(c)
        if not any(coords) or coords in seen:
            continue
        seen.add(coords)
        out.append(space.representative(coords))
    return tuple(out), substituted


def transgression_pairing(
    group: FiniteGroup,
    q: int,
    top: Subgroup,
    floor: Subgroup,
    alpha: Union[H2Subspace, Callable[[H2Space], H2Subspace]],
    solver: Optional[TransgressionSolver] = None,
) -> TransgressionPairing:
    if solver is None:
        solver = transgression_solver(group, top, q)
    sub = alpha(solver.space) if callable(alpha) else alpha
    if sub.space is not solver.space:
        raise ValueError("coefficient submodule must live on the solver's quotient")
    module = central_subquotient(group, top, floor, q)
    classes, substituted = _inflation_kernel_classes(group, q, floor, solver, sub.gens)
    preimages = []
    for c in classes:
        psi = solver.preimage(c)
        if psi is None:
            raise AssertionError(
                "kernel class with no transgression preimage (five-term exactness violated)"
            )
        preimages.append(psi)
    inv = solver.invariants
    well_defined = all(
        inv.value(psi, int(m)) == 0 for psi in preimages for m in floor.members
    )
    table = np.array(
        [[inv.value(psi, rep) for psi in preimages] for rep in module.reps],
        dtype=np.int64,
    ).reshape(len(module.reps), len(classes))
    rel = _combo_kernel(solver.space.group, q, list(classes))
    right = _presentation(len(classes), q, rel)
    if well_defined:
        report = pairing_perfection(ZqMatrix(table, q), module.presentation, right)
    else:
        report = PairingReport(
            matrix=ZqMatrix(table, q),
            perfect=False,
            left_order=module.presentation.order,
            right_order=right.order,
            left_annihilator=(),
            right_annihilator=(),
        )
    return TransgressionPairing(module, tuple(classes), tuple(preimages), well_defined, substituted, report)


# --------------------------------------------------------------------------
# the six duality conditions


@dataclass(frozen=True, eq=False)
class DualityConditionsReport:
    """Verdicts of the six equivalent duality conditions (they must agree)."""

    kernel_matches_preimage: bool
    exact_through_coefficients: bool
    quotient_kernel_matches: bool
    pairing_perfect: bool
    annihilator_is_floor: bool
    lift_kernels_meet_floor: bool
    annihilator: Subgroup
    substituted: bool

    def as_tuple(self) -> tuple[bool, bool, bool, bool, bool, bool]:
        return (
            self.kernel_matches_preimage,
            self.exact_through_coefficients,
            self.quotient_kernel_matches,
            self.pairing_perfect,
            self.annihilator_is_floor,
            self.lift_kernels_meet_floor,
        )

    @property
    def verdict(self) -> bool:
        return self.kernel_matches_preimage


def _intersection_class_reps(
    space: H2Space, gens_a: Sequence[Cochain2], gens_b: Sequence[Cochain2], q: int
) -> tuple[Cochain2, ...]:
    """Canonical representatives generating span(gens_a) ∩ span(gens_b) mod coboundaries."""
    ka, kb = len(gens_a), len(gens_b)
    if ka == 0 or kb == 0:
        return ()
    rows_a = np.array([space.v_vector(c) for c in gens_a], dtype=np.int64)
    rows_b = np.array([space.v_vector(c) for c in gens_b], dtype=np.int64)
    cob = space._cob_v
    stacked = np.concatenate([rows_a, cob, rows_b, cob], axis=0)
    combos = kernel(ZqMatrix(stacked.T, q)).entries
    seen: set[tuple[int, ...]] = set()
    out: list[Cochain2] = []
    for row in combos:
        c = _combine2(space.group, q, list(gens_a), row[:ka])
        coords = space.coordinates_of(c)
        if not any(coords) or coords in seen:
            continue
        seen.add(coords)
        out.append(space.representative(coords))
    return tuple(out)


def _lift_kernel_mask(
    group: FiniteGroup, data: QuotientData, ext: CentralExtensionSpec
) -> np.ndarray:
    """Intersection of Ker(Ψ) over all lifts Ψ: G → E above the projection."""
    gens = list(group.generators)
    if ext.modulus ** len(gens) > SEARCH_CAP:
        raise ValueError("lift enumeration too large")
    tree = _bfs_tree(group.table, group.identity, gens)
    pi = data.projection.images
    m = ext.base.order
    fibers = [
        [a * m + int(pi[g]) for a in range(ext.modulus)] for g in gens
    ]
    acc: Optional[np.ndarray] = None
    for assignment in itertools.product(*fibers):
        images = _extend_gen_images(group, tree, assignment, ext.total)
        if not _is_multiplicative(group, ext.total, images):
            continue
        assert np.array_equal(ext.projection.images[images], pi)
        mask = images == ext.total.identity
        acc = mask if acc is None else (acc & mask)
    if acc is None:
        raise AssertionError("no lift exists for a transgressed class")
    return acc


def duality_conditions(
    group: FiniteGroup,
    q: int,
    top: Subgroup,
    floor: Subgroup,
    alpha: Union[H2Subspace, Callable[[H2Space], H2Subspace]],
    a0: Sequence[Cochain2] = (),
    solver: Optional[TransgressionSolver] = None,
) -> DualityConditionsReport:
    """Evaluate all six duality conditions for (T, T₀, A) independently.

    The six verdicts are asserted to agree (they are equivalent statements);
    the returned report carries the common verdict plus the computed
    annihilator subgroup.
    """
    if solver is None:
        solver = transgression_solver(group, top, q)
    space = solver.space
    inv = solver.invariants
    sub = alpha(space) if callable(alpha) else alpha
    if sub.space is not space:
        raise ValueError("coefficient submodule must live on the solver's quotient")
    kamb = len(inv.basis)
    width = kamb
    rel_rows = np.diag(np.array(inv.invariant_factors, dtype=np.int64)) if kamb else np.zeros((0, 0), dtype=np.int64)
    K = restriction_kernel(group, top, floor, q, invariants=inv)
    k_rows = K.coordinate_rows

    # (a) restriction kernel equals the transgression preimage of A
    span_rows = sub._span.matrix.entries
    if kamb:
        stacked = np.concatenate([solver._image_v, span_rows], axis=0)
        pre_a = kernel(ZqMatrix(stacked.T, q)).entries[:, :kamb] % q
        cond_a = _rows_span_equal(
            np.concatenate([pre_a, rel_rows], axis=0),
            np.concatenate([k_rows.reshape(-1, kamb), rel_rows], axis=0),
            width,
            q,
        )
    else:
        cond_a = True

    # kernel of inflation restricted to A, as a subspace of H²(G/T)
    ker_classes, substituted = _inflation_kernel_classes(group, q, floor, solver, sub.gens)
    ker_sub = span_of_classes(space, list(ker_classes))

    # (b) transgression maps the restriction kernel isomorphically onto that kernel
    trg_k = [
        _combine2(space.group, q, list(solver.images), row) for row in k_rows
    ]
    trg_sub = span_of_classes(space, trg_k)
    if kamb:
        stacked = np.concatenate([solver._image_v, space._cob_v], axis=0)
        ker_trg = kernel(ZqMatrix(stacked.T, q)).entries[:, :kamb] % q
        meet = _span_intersection(
            np.concatenate([k_rows.reshape(-1, kamb), rel_rows], axis=0),
            np.concatenate([ker_trg, rel_rows], axis=0),
            width,
            q,
        )
        injective = all(row_span_contains(howell_form(_as_matrix(rel_rows, width, q)), r) for r in meet)
    else:
        injective = True
    cond_b = (
        injective
        and all(sub.contains(c) for c in trg_k)
        and _subspace_equal(trg_sub, ker_sub)
    )

    # (c) kernel toward G/T₀ sits in A and matches the inflation kernel
    qd0 = quotient(group, floor)
    mid_images = solver.data.projection.images[qd0.coset_reps]
    mid_hom = GroupHom(qd0.quotient, space.group, mid_images)
    if space.basis:
        combos0 = _combo_kernel(qd0.quotient, q, list(space.basis), images=mid_hom.images)
        kp_classes = []
        seen: set[tuple[int, ...]] = set()
        for row in combos0:
            c = _combine2(space.group, q, list(space.basis), row)
            coords = space.coordinates_of(c)
            if not any(coords) or coords in seen:
                continue
            seen.add(coords)
            kp_classes.append(space.representative(coords))
    else:
        kp_classes = []
    kp_sub = span_of_classes(space, kp_classes)
    cond_c = _subspace_contains(sub, kp_sub) and _subspace_equal(kp_sub, ker_sub)

    # (d) the transgression pairing on T/T₀ × Ker(inf|A) is perfect
    pairing = transgression_pairing(group, q, top, floor, sub, solver=solver)
    cond_d = pairing.perfect

    # (e) the annihilator of A ∩ img(trg) inside T is exactly T₀
    inter = _intersection_class_reps(space, sub.gens, solver.images, q)
    psis = []
    for c in inter:
        psi = solver.preimage(c)
        assert psi is not None
        psis.append(psi)
    ann_members = [
        int(t)
        for t in top.members
        if all(inv.value(psi, int(t)) == 0 for psi in psis)
    ]
    annihilator = Subgroup(group, tuple(ann_members))
    cond_e = annihilator.same_as(floor)

    # (f) lifts into the central extensions of the A₀-classes cut out T₀
    chosen = tuple(a0) if a0 else inter
    for c in chosen:
        if not sub.contains(c):
            raise ValueError("a0 class lies outside the coefficient submodule")
    if chosen:
        mask = np.ones(group.order, dtype=bool)
        for c in chosen:
            ext = extension_from_class(space.group, c)
            mask &= _lift_kernel_mask(group, solver.data, ext)
    else:
        mask = top.mask.copy()
    f_sub = Subgroup(group, tuple(int(x) for x in np.flatnonzero(mask)))
    cond_f = f_sub.same_as(floor)

    verdicts = (cond_a, cond_b, cond_c, cond_d, cond_e, cond_f)
    if len(set(verdicts)) != 1:
        raise AssertionError(f"duality conditions disagree: {verdicts}")
    return DualityConditionsReport(
        kernel_matches_preimage=cond_a,
        exact_through_coefficients=cond_b,
        quotient_kernel_matches=cond_c,
        pairing_perfect=cond_d,
        annihilator_is_floor=cond_e,
        lift_kernels_meet_floor=cond_f,
        annihilator=annihilator,
        substituted=substituted,
    )


def is_dual(
    group: FiniteGroup,
    q: int,
    top: Subgroup,
    floor: Subgroup,
    alpha: Union[H2Subspace, Callable[[H2Space], H2Subspace]],
) -> bool:
    """Whether A is dual to (T, T₀): the common verdict of the six conditions."""
    return duality_conditions(group, q, top, floor, alpha).verdict


# --------------------------------------------------------------------------
# the triple axioms


@dataclass(frozen=True, eq=False)
class TripleAxiomsReport:
    normality: bool
    chain: bool
    epi_compatible: bool
    duality: Optional[bool]

    @property
    def all_hold(self) -> bool:
        return self.normality and self.chain and self.epi_compatible and self.duality is not False


def triple_axioms(
    group: FiniteGroup,
    q: int,
    triple: DualityTriple,
    epis: Sequence[GroupHom] = (),
) -> TripleAxiomsReport:
    """Check the functor axioms for one triple on one group.

    Epimorphisms (onto groups of the same kind of interest) verify the
    naturality axiom; the duality axiom is evaluated when the level-2
    quotient is a free module, and reported as None otherwise.
    """
    top = triple.top(group, q)
    floor = triple.floor(group, q)
    normality = top.is_normal() and floor.is_normal()
    lower = subgroup_closure(
        group,
        [group.power(t, q) for t in top.members]
        + list(commutator_subgroup(group, top, whole_group(group)).members),
    )
    chain = (
        all(floor.contains(m) for m in lower.members)
        and all(top.contains(m) for m in floor.members)
    )
    epi_ok = True
    for pi in epis:
        if not pi.is_surjective():
            raise ValueError("axiom check needs epimorphisms")
        tgt_top = triple.top(pi.target, q)
        tgt_floor = triple.floor(pi.target, q)
        img_top = sorted({int(pi(int(m))) for m in top.members})
        img_floor = sorted({int(pi(int(m))) for m in floor.members})
        epi_ok = epi_ok and img_top == list(tgt_top.members)
        epi_ok = epi_ok and img_floor == list(tgt_floor.members)
    try:
        level2_frame(group, q)
        duality: Optional[bool] = is_dual(group, q, top, floor, triple.alpha_image)
    except ValueError:
        duality = None
    return TripleAxiomsReport(normality, chain, epi_ok, duality)


# --------------------------------------------------------------------------
# tensor-power functors


def _class_zero_test(group: FiniteGroup, q: int) -> Callable[[Cochain2], bool]:
    if group.order <= 64:
        space = h2(group, q)
        return space.is_zero_class
    return lambda c: is_coboundary(c) is not None


def _alpha_zero_predicate(
    triple: DualityTriple,
    t: int,
    chars: Sequence[Cochain1],
    carrier: FiniteGroup,
    q: int,
    zero_test: Callable[[Cochain2], bool],
) -> Callable[[tuple[np.ndarray, ...]], bool]:
    active = t in triple.active_degrees
    if not active or t > 2:
        return lambda tup: True

    def chi(vec: np.ndarray) -> Cochain1:
        return _combine1(carrier, q, list(chars), [int(x) for x in vec])

    if t == 1:
        return lambda tup: zero_test(bockstein(chi(tup[0])))
    return lambda tup: zero_test(cup11(chi(tup[0]), chi(tup[1])))


def alpha_tensor_quotient(
    group: FiniteGroup,
    q: int,
    triple: DualityTriple,
    r: int,
    t: int,
    h1space: Optional[H1Space] = None,
) -> AbGroupPresentation:
    """The degree-r tensor power of H¹(G) modulo the α-killed t-spans."""
    h1s = h1space if h1space is not None else h1(group, q)
    pred = _alpha_zero_predicate(
        triple, t, h1s.basis, group, q, _class_zero_test(group, q)
    )
    kill = tensor_kill_rows(h1s.invariant_factors, q, r, t, pred)
    return tensor_quotient(h1s.invariant_factors, q, r, kill)


def _tensor_base_rows(factors: Sequence[int], q: int, r: int) -> np.ndarray:
    m = len(factors)
    rows = []
    for tup in itertools.product(range(m), repeat=r):
        f = min(factors[k] for k in tup)
        if f < q:
            row = np.zeros(m**r, dtype=np.int64)
            flat = 0
            for k in tup:
                flat = flat * m + k
            row[flat] = f
            rows.append(row)
    if not rows:
        return np.zeros((0, m**r), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


# --------------------------------------------------------------------------
# inflation isomorphism table (quotients by N ≤ T)


@dataclass(frozen=True, eq=False)
class InflationIsoRow:
    sub: Subgroup
    in_floor: bool
    alpha_iso: bool
    tensor_iso: dict


@dataclass(frozen=True, eq=False)
class InflationIsoTable:
    group: FiniteGroup
    kind: str
    rows: tuple[InflationIsoRow, ...]


def inflation_isomorphism_table(
    group: FiniteGroup,
    q: int,
    triple: DualityTriple,
    degrees: Sequence[int] = (1, 2, 3),
) -> InflationIsoTable:
    """For every normal N ≤ T: does inflation identify A(G/N) with A(G)?

    Asserts N ≤ T₀ ⇔ A-inflation iso, and that the iso forces every
    tensor-power functor to inflate isomorphically as well.
    """
    top = triple.top(group, q)
    floor = triple.floor(group, q)
    h1g = h1(group, q)
    own_gens = triple.alpha_generator_classes(group, q, h1space=h1g)
    own_rows = (
        np.array(
            [c.values[:, list(_solver_gens(group))].reshape(-1) for c in own_gens],
            dtype=np.int64,
        )
        % q
        if own_gens
        else np.zeros((0, group.order * len(_solver_gens(group))), dtype=np.int64)
    )
    cob_g = _coboundary_rows(group, q, _solver_gens(group))
    rows_out = []
    for N in normal_subgroups_within(group, top):
        qd = quotient(group, N)
        h1n = h1(qd.quotient, q)
        gens_n = triple.alpha_generator_classes(qd.quotient, q, h1space=h1n)
        in_floor = all(floor.contains(int(m)) for m in N.members)
        # kernel combos upstairs vs downstairs decide injectivity on classes
        combos_up = _combo_kernel(group, q, list(gens_n), images=qd.projection.images)
        combos_down = _combo_kernel(qd.quotient, q, list(gens_n))
        kwidth = len(gens_n)
        injective = _rows_span_equal(combos_up, combos_down, kwidth, q) if kwidth else True
        if gens_n:
            lifted = np.array(
                [
                    c.values[np.ix_(qd.projection.images, qd.projection.images[list(_solver_gens(group))])].reshape(-1)
                    for c in gens_n
                ],
                dtype=np.int64,
            ) % q
            lifted_span = howell_form(
                ZqMatrix(np.concatenate([lifted, cob_g], axis=0), q)
            )
        else:
            lifted_span = howell_form(ZqMatrix(cob_g, q))
        surjective = all(row_span_contains(lifted_span, r) for r in own_rows)
        alpha_iso = injective and surjective
        tensor_iso: dict = {}
        base = {r: _tensor_base_rows(h1n.invariant_factors, q, r) for r in degrees}
        zero_down = _class_zero_test(qd.quotient, q)
        zero_up = _class_zero_test(group, q)
        lifted_chars = [Cochain1(group, q, chi.values[qd.projection.images]) for chi in h1n.basis]
        for t in triple.active_degrees:
            for r in degrees:
                if r < t:
                    continue
                pred_down = _alpha_zero_predicate(triple, t, h1n.basis, qd.quotient, q, zero_down)
                pred_up = _alpha_zero_predicate(triple, t, lifted_chars, group, q, zero_up)
                kill_down = tensor_kill_rows(h1n.invariant_factors, q, r, t, pred_down)
                kill_up = tensor_kill_rows(h1n.invariant_factors, q, r, t, pred_up)
                m = len(h1n.invariant_factors)
                tensor_iso[(r, t)] = _rows_span_equal(
                    np.concatenate([kill_down.reshape(-1, m**r), base[r]], axis=0),
                    np.concatenate([kill_up.reshape(-1, m**r), base[r]], axis=0),
                    m**r,
                    q,
                )
        if in_floor != alpha_iso:
            raise AssertionError(
                f"containment in the floor and A-inflation disagree on {N.members}"
            )
        if alpha_iso and not all(tensor_iso.values()):
            raise AssertionError(
                f"A-inflation is an isomorphism but a tensor functor is not on {N.members}"
            )
        rows_out.append(InflationIsoRow(N, in_floor, alpha_iso, tensor_iso))
    return InflationIsoTable(group, triple.kind, tuple(rows_out))


# --------------------------------------------------------------------------
# epimorphism conditions


@dataclass(frozen=True, eq=False)
class ProjectionReport:
    quotient_iso: bool
    kernel_in_floor: bool
    pullback_iso: bool
    pullback_mono: bool

    @property
    def all_equal(self) -> bool:
        return len({self.quotient_iso, self.kernel_in_floor, self.pullback_iso, self.pullback_mono}) == 1


def projection_conditions(
    pi: GroupHom,
    q: int,
    triple: DualityTriple,
    strict: bool = True,
) -> ProjectionReport:
    """Equivalent conditions on an epimorphism that respects the level-2 split.

    (i) the induced map on the T₀-quotients is an isomorphism, (ii) the
    kernel sits inside T₀, (iii)/(iv) the pullback on coefficient submodules
    is an isomorphism / a monomorphism.  With ``strict`` the four verdicts
    are asserted equal.
    """
    if not pi.is_surjective():
        raise ValueError("projection conditions need an epimorphism")
    g1, g2 = pi.source, pi.target
    top1 = triple.top(g1, q)
    top2 = triple.top(g2, q)
    qd2 = quotient(g2, top2)
    level2 = GroupHom(g1, qd2.quotient, qd2.projection.images[pi.images])
    if not level2.kernel().same_as(top1):
        raise ValueError("epimorphism does not identify the level-2 quotients")
    floor1 = triple.floor(g1, q)
    floor2 = triple.floor(g2, q)
    qd20 = quotient(g2, floor2)
    to_floor2 = GroupHom(g1, qd20.quotient, qd20.projection.images[pi.images])
    quotient_iso = to_floor2.kernel().same_as(floor1)
    kernel_in_floor = all(floor1.contains(int(m)) for m in pi.kernel().members)
    gens2 = triple.alpha_generator_classes(g2, q)
    combos_up = _combo_kernel(g1, q, list(gens2), images=pi.images)
    combos_down = _combo_kernel(g2, q, list(gens2))
    kwidth = len(gens2)
    mono = _rows_span_equal(combos_up, combos_down, kwidth, q) if kwidth else True
    gens1 = triple.alpha_generator_classes(g1, q)
    g1_gens = _solver_gens(g1)
    cob1 = _coboundary_rows(g1, q, g1_gens)
    pulled = (
        np.array(
            [c.values[np.ix_(pi.images, pi.images[list(g1_gens)])].reshape(-1) for c in gens2],
            dtype=np.int64,
        )
        % q
        if gens2
        else np.zeros((0, g1.order * len(g1_gens)), dtype=np.int64)
    )
    pulled_span = howell_form(ZqMatrix(np.concatenate([pulled, cob1], axis=0), q))
    own1 = [c.values[:, list(g1_gens)].reshape(-1) % q for c in gens1]
    surj = all(row_span_contains(pulled_span, r) for r in own1)
    report = ProjectionReport(quotient_iso, kernel_in_floor, mono and surj, mono)
    if strict and not report.all_equal:
        raise AssertionError(
            f"projection conditions disagree: {report}"
        )
    return report


# --------------------------------------------------------------------------
# relation type of the level-2 kernel


@dataclass(frozen=True, eq=False)
class GaloisRelationReport:
    """The three-part shape test for the defining relations of G.

    (i) the level-2 quotient is a free Z/q-module; (ii) one degree-1 class ξ
    twists every Bockstein into a cup product; (iii) the inflation kernel of
    the decomposable part is generated by cup products lying in it.
    """

    free_level2: bool
    bockstein_by_cup: bool
    twist: Optional[Cochain1]
    kernel_cup_generated: bool

    @property
    def passes(self) -> bool:
        return self.free_level2 and self.bockstein_by_cup and self.kernel_cup_generated


def galois_relation_type(group: FiniteGroup, q: int) -> GaloisRelationReport:
    try:
        frame = level2_frame(group, q)
        free_level2 = True
    except ValueError:
        frame = None
        free_level2 = False
    h1s = h1(group, q)
    zero = _class_zero_test(group, q)
    if h1s.order > SEARCH_CAP:
        raise ValueError("twist search too large")
    twist = None
    for xi in h1s.enumerate_elements():
        if all(zero(bockstein(chi) - cup11(chi, xi)) for chi in h1s.basis):
            twist = xi
            break
    kernel_cup_generated = False
    if frame is not None:
        dec = h2_dec(frame.space)
        combos = _combo_kernel(group, q, list(dec.gens), images=frame.data.projection.images)
        ker_classes = []
        seen: set[tuple[int, ...]] = set()
        for row in combos:
            c = _combine2(frame.quotient, q, list(dec.gens), row)
            coords = frame.space.coordinates_of(c)
            if any(coords) and coords not in seen:
                seen.add(coords)
                ker_classes.append(frame.space.representative(coords))
        ker_sub = span_of_classes(frame.space, ker_classes)
        found: list[Cochain2] = []
        vectors = list(itertools.product(range(q), repeat=frame.d))
        for a in vectors:
            if not any(a):
                continue
            for b in vectors:
                c = cup11(frame.char_of(a), frame.char_of(b))
                if ker_sub.contains(c):
                    found.append(c)
        kernel_cup_generated = _subspace_equal(span_of_classes(frame.space, found), ker_sub)
    return GaloisRelationReport(free_level2, twist is not None, twist, kernel_cup_generated)


# --------------------------------------------------------------------------
# generating pairs for the inflation kernel, and the extensions they define


@dataclass(frozen=True, eq=False)
class KernelPair:
    """A finite level-2 quotient with a tensor whose α-value generates kernel."""

    quotient: FiniteGroup
    data: QuotientData
    linear: Optional[Cochain1]
    pair: Optional[tuple[Cochain1, Cochain1]]
    defining_class: Cochain2
    kernel_class: Cochain2


@dataclass(frozen=True, eq=False)
class KernelGeneratingSet:
    entries: tuple[KernelPair, ...]
    kernel_order: int
    generates: bool
    relation_type: GaloisRelationReport


def _alpha_of_parts(
    carrier: FiniteGroup,
    q: int,
    linear: Optional[Cochain1],
    pair: Optional[tuple[Cochain1, Cochain1]],
) -> Cochain2:
    acc = np.zeros((carrier.order, carrier.order), dtype=np.int64)
    if linear is not None:
        acc += bockstein(linear).values
    if pair is not None:
        acc += cup11(pair[0], pair[1]).values
    return Cochain2(carrier, q, acc)


def kernel_generating_pairs(
    group: FiniteGroup, q: int, triple: DualityTriple
) -> KernelGeneratingSet:
    """Greedy tensors of the triple's shape whose α-values generate the kernel.

    The kernel is Ker(inf: A(G/T) → H²(G)).  Each chosen tensor is pushed to
    the smallest quotient of G/T on which its characters live; the α-value
    there is recorded as the defining class of that entry.
    """
    grt = galois_relation_type(group, q)
    frame = level2_frame(group, q)
    A = triple.alpha_image(frame.space)
    combos = _combo_kernel(group, q, list(A.gens), images=frame.data.projection.images)
    seen: set[tuple[int, ...]] = set()
    ker_classes = []
    for row in combos:
        c = _combine2(frame.quotient, q, list(A.gens), row)
        coords = frame.space.coordinates_of(c)
        if any(coords) and coords not in seen:
            seen.add(coords)
            ker_classes.append(frame.space.representative(coords))
    ker_sub = span_of_classes(frame.space, ker_classes)
    target_order = ker_sub.order
    vectors = list(itertools.product(range(q), repeat=frame.d))
    candidates: list[tuple[Optional[np.ndarray], Optional[tuple[np.ndarray, np.ndarray]]]] = []
    if triple.kind == "dec-cup":
        for a in vectors:
            for b in vectors:
                candidates.append((None, (np.array(a), np.array(b))))
    elif triple.kind == "bock":
        for a in vectors:
            if any(a):
                candidates.append((np.array(a), None))
    else:
        for a in vectors:
            if not any(a):
                continue
            for b in vectors:
                neg = (-np.array(a)) % q
                candidates.append((neg, (np.array(a), np.array(b))))
    kept: list[KernelPair] = []
    kept_classes: list[Cochain2] = []
    for lin_vec, pair_vecs in candidates:
        span = span_of_classes(frame.space, kept_classes)
        if span.order == target_order:
            break
        lin = frame.char_of(lin_vec) if lin_vec is not None else None
        pair = (
            (frame.char_of(pair_vecs[0]), frame.char_of(pair_vecs[1]))
            if pair_vecs is not None
            else None
        )
        c = _alpha_of_parts(frame.quotient, q, lin, pair)
        if not ker_sub.contains(c):
            continue
        if span.contains(c):
            continue
        kill_vecs = []
        if lin_vec is not None:
            kill_vecs.append(lin_vec)
        if pair_vecs is not None:
            kill_vecs.extend(pair_vecs)
        N = frame.kernel_subgroup(kill_vecs)
        qd2 = quotient(frame.quotient, N)
        lin_small = (
            Cochain1(qd2.quotient, q, lin.values[qd2.coset_reps]) if lin is not None else None
        )
        pair_small = (
            tuple(Cochain1(qd2.quotient, q, chi.values[qd2.coset_reps]) for chi in pair)
            if pair is not None
            else None
        )
        defining = _alpha_of_parts(qd2.quotient, q, lin_small, pair_small)
        kept.append(KernelPair(qd2.quotient, qd2, lin_small, pair_small, defining, c))
        kept_classes.append(c)
    generates = span_of_classes(frame.space, kept_classes).order == target_order
    return KernelGeneratingSet(tuple(kept), target_order, generates, grt)


def _named_candidates(order: int, q: int) -> list[tuple[str, FiniteGroup]]:
    try:
        p, _ = factor_prime_power(order)
    except ValueError:
        return []
    out: list[tuple[str, FiniteGroup]] = []
    if order == p:
        out.append((f"cyclic({p})", preset("cyclic", [p])))
    elif order == p**2:
        out.append((f"cyclic({order})", preset("cyclic", [order])))
        out.append((f"elementary_abelian({p},2)", preset("elementary_abelian", [p, 2])))
    elif order == p**3:
        out.append((f"cyclic({order})", preset("cyclic", [order])))
        out.append(
            (
                f"cyclic({p**2})xcyclic({p})",
                direct_product(preset("cyclic", [p**2]), preset("cyclic", [p])),
            )
        )
        out.append((f"elementary_abelian({p},3)", preset("elementary_abelian", [p, 3])))
        if p == 2:
            out.append(("dihedral4", preset("dihedral4")))
            out.append(("quaternion8", preset("quaternion8")))
        else:
            out.append((f"heisenberg({p})", preset("heisenberg", [p])))
            out.append((f"modular({p})", preset("modular", [p])))
    return out


def _identify_small(group: FiniteGroup, q: int) -> Optional[str]:
    for name, cand in _named_candidates(group.order, q):
        if is_isomorphic(group, cand):
            return name
    return None


@dataclass(frozen=True, eq=False)
class ExtensionEntry:
    group: FiniteGroup
    source: KernelPair
    name: Optional[str]


@dataclass(frozen=True, eq=False)
class ExtensionList:
    entries: tuple[ExtensionEntry, ...]
    generating: KernelGeneratingSet


def extension_list(group: FiniteGroup, q: int, triple: DualityTriple) -> ExtensionList:
    """Isomorphism classes of the central extensions cut out by the kernel pairs."""
    ks = kernel_generating_pairs(group, q, triple)
    entries: list[ExtensionEntry] = []
    for pair in ks.entries:
        ext = extension_from_class(pair.quotient, pair.defining_class)
        if any(is_isomorphic(ext.total, e.group) for e in entries):
            continue
        entries.append(ExtensionEntry(ext.total, pair, _identify_small(ext.total, q)))
    return ExtensionList(tuple(entries), ks)


def floor_by_intersection(group: FiniteGroup, q: int, triple: DualityTriple) -> Subgroup:
    """T ∩ ⋂ Ker(π) over all epimorphisms π onto the listed extensions.

    An empty extension list leaves the intersection at T itself.
    """
    ext = extension_list(group, q, triple)
    mask = triple.top(group, q).mask.copy()
    for entry in ext.entries:
        for hom in enumerate_homs(group, entry.group, surjective_only=True):
            mask &= hom.kernel().mask
    return Subgroup(group, tuple(int(x) for x in np.flatnonzero(mask)))


@dataclass(frozen=True, eq=False)
class Lower3Report:
    lower3: Subgroup
    intersection: Subgroup
    equal: bool
    relation_type: GaloisRelationReport


def lower3_intersection_check(group: FiniteGroup, p: int) -> Lower3Report:
    """Compare the lower-3 subgroup with the named-quotient intersection.

    For p odd the targets are Z/p and the exponent-p extraspecial group of
    order p³; for p = 2 they are Z/2, Z/4 and the dihedral group of order 8.
    Equality is asserted when the relation-type test passes, and only
    reported otherwise.
    """
    factor_prime_power(p)
    if p != factor_prime_power(p)[0]:
        raise ValueError("intersection lists need a prime modulus")
    grt = galois_relation_type(group, p)
    low = lower3_subgroup(group, p)
    if p == 2:
        targets = [preset("cyclic", [2]), preset("cyclic", [4]), preset("dihedral4")]
    else:
        targets = [preset("cyclic", [p]), preset("heisenberg", [p])]
    mask = np.ones(group.order, dtype=bool)
    for tgt in targets:
        for hom in enumerate_homs(group, tgt, surjective_only=True):
            mask &= hom.kernel().mask
    inter = Subgroup(group, tuple(int(x) for x in np.flatnonzero(mask)))
    equal = inter.same_as(low)
    if grt.passes and not equal:
        raise AssertionError(
            f"relation type passes but the intersection misses the lower-3 subgroup: "
            f"{low.members} vs {inter.members}"
        )
    return Lower3Report(low, inter, equal, grt)


# --------------------------------------------------------------------------
# decomposable transgressions


@dataclass(frozen=True, eq=False)
class TransgressionDecomposableReport:
    decomposable: bool
    cyclic_local: bool
    extends_on_lines: bool
    kills_lower3: bool

    @property
    def all_equal(self) -> bool:
        return len({self.decomposable, self.cyclic_local, self.extends_on_lines, self.kills_lower3}) == 1


def decomposable_transgression_conditions(
    group: FiniteGroup,
    q: int,
    psi: Cochain1,
    strict: bool = True,
) -> TransgressionDecomposableReport:
    """Four equivalent tests for trg(ψ) landing in the decomposable part.

    ψ is an invariant homomorphism on the level-2 term T.  The local test
    scales the transgression within each preimage M of a cyclic order-q
    subgroup of G/T by δ; the extension test asks for degree-1 classes of M
    restricting to δψ; the last test evaluates ψ on the lower-3 subgroup.
    """
    p, _ = factor_prime_power(q)
    delta = 2 if p == 2 else 1
    top = q_central_series(group, q).term(2)
    frame = level2_frame(group, q)
    tg = transgression(group, top, psi, q, data=frame.data)
    decomposable = h2_dec(frame.space).contains(tg)

    Q = frame.quotient
    orders = element_orders(Q)
    seen_lines: set[tuple[int, ...]] = set()
    cyclic_local = True
    extends_on_lines = True
    t_members = np.array(top.members, dtype=np.int64)
    for x in np.flatnonzero(orders == q):
        line = subgroup_closure(Q, [int(x)])
        if line.members in seen_lines:
            continue
        seen_lines.add(line.members)
        m_members = np.flatnonzero(line.mask[frame.data.projection.images])
        m_sub = Subgroup(group, tuple(int(y) for y in m_members))
        mgrp = subgroup_as_group(m_sub)
        positions = np.searchsorted(m_members, t_members)
        t_in_m = Subgroup(mgrp, tuple(int(pos) for pos in positions))
        psi_m = Cochain1(subgroup_as_group(t_in_m), q, psi.values.copy())
        tg_line = transgression(mgrp, t_in_m, psi_m, q, require_level2=False)
        if is_coboundary(tg_line.scale(delta)) is None:
            cyclic_local = False
        h1m = h1(mgrp, q)
        target = (delta * psi.values) % q
        if h1m.basis:
            mat = np.array([b.values[positions] for b in h1m.basis], dtype=np.int64)
            found = solve(ZqMatrix(mat.T, q), target) is not None
        else:
            found = not target.any()
        if not found:
            extends_on_lines = False
    low = lower3_subgroup(group, q)
    pos_in_top = np.searchsorted(t_members, np.array(low.members, dtype=np.int64))
    kills_lower3 = not psi.values[pos_in_top].any()
    report = TransgressionDecomposableReport(
        decomposable, cyclic_local, extends_on_lines, kills_lower3
    )
    if strict and not report.all_equal:
        raise AssertionError(f"decomposable-transgression conditions disagree: {report}")
    return report


# --------------------------------------------------------------------------
# local-global detection of the decomposable part


@dataclass(frozen=True, eq=False)
class LocalGlobalReport:
    matches: bool
    checked: int
    coefficient_route: bool


def local_global_check(d: int, q: int) -> LocalGlobalReport:
    """On (Z/q)^d: a class is decomposable iff δ·res kills it on every line.

    Also verifies the coefficient identity: restricting to the k-th
    coordinate line reads off the k-th Bockstein slot.
    """
    p, _ = factor_prime_power(q)
    delta = 2 if p == 2 else 1
    Q = preset("elementary_abelian", [q, d])
    space = h2(Q, q)
    dec_set = h2_dec(space).coordinate_members()
    orders = element_orders(Q)
    lines = []
    seen: set[tuple[int, ...]] = set()
    for x in np.flatnonzero(orders == q):
        line = subgroup_closure(Q, [int(x)])
        if line.members in seen:
            continue
        seen.add(line.members)
        lines.append(line)
    maps = []
    for line in lines:
        sgrp = subgroup_as_group(line)
        sspace = h2(sgrp, q)
        rows = np.array(
            [sspace.coordinates_of(restriction2(b, line, sgrp)) for b in space.basis],
            dtype=np.int64,
        ).reshape(len(space.basis), -1)
        maps.append((rows, np.array(sspace.invariant_factors, dtype=np.int64)))
    checked = 0
    matches = True
    for coords in space.enumerate_coordinates():
        checked += 1
        vec = np.array(coords, dtype=np.int64)
        local = True
        for rows, facs in maps:
            res = (delta * (vec @ rows)) % facs if facs.size else np.zeros(0, dtype=np.int64)
            if res.any():
                local = False
                break
        if local != (coords in dec_set):
            matches = False
    # coefficient route on the coordinate lines
    frame = level2_frame(Q, q)
    coefficient_route = True
    for k in range(frame.d):
        line = subgroup_closure(frame.quotient, [frame.basis[k]])
        sgrp = subgroup_as_group(line)
        sspace = h2(sgrp, q)
        res_chi = Cochain1(sgrp, q, frame.chars[k].values[np.array(line.members, dtype=np.int64)])
        for i in range(frame.d):
            lhs = restriction2(bockstein(frame.chars[i]), line, sgrp)
            rhs = bockstein(res_chi).scale(1 if i == k else 0)
            coefficient_route = coefficient_route and sspace.same_class(lhs, rhs)
        for i, j in frame.symbolic.pairs:
            lhs = restriction2(cup11(frame.chars[i], frame.chars[j]), line, sgrp)
            coefficient_route = coefficient_route and sspace.is_zero_class(lhs)
    return LocalGlobalReport(matches, checked, coefficient_route)


# --------------------------------------------------------------------------
# dual bases on the free level-3 models


@dataclass(frozen=True, eq=False)
class DualBasisReport:
    matrix: np.ndarray
    formula_matrix: np.ndarray

    @property
    def identity(self) -> bool:
        n = self.matrix.shape[0]
        return bool(np.array_equal(self.matrix, np.eye(n, dtype=np.int64)))

    @property
    def formulas_match(self) -> bool:
        return bool(np.array_equal(self.matrix, self.formula_matrix))


def closed_pairing_value(
    model: FreeLevel3Model,
    element: int,
    linear: Optional[Sequence[int]] = None,
    pair: Optional[tuple[Sequence[int], Sequence[int]]] = None,
) -> int:
    """The substitution pairing value by the closed normal-form formulas.

    For an element of the level-2 part with normal form Π σ_i^{q·c_i} ·
    Π [σ_i, σ_j]^{b_ij}: a Bockstein class with coefficients u pairs to
    Σ c_i·u_i, and a cup product of u and v pairs to (q/δ)·Σ c_i·u_i·v_i +
    Σ_{i<j} b_ij·(u_i·v_j − u_j·v_i).
    """
    if model.variant != "sharp":
        raise ValueError("closed pairing formulas live on the sharp model")
    q = model.q
    d = model.d
    nf = model.coords[element]
    if nf[:d].any():
        raise ValueError("element lies outside the level-2 part")
    c = nf[d : 2 * d]
    b = nf[2 * d :]
    total = 0
    if linear is not None:
        u = np.asarray(linear, dtype=np.int64)
        total += int((c * u).sum())
    if pair is not None:
        u = np.asarray(pair[0], dtype=np.int64)
        v = np.asarray(pair[1], dtype=np.int64)
        total += (q // model.delta) * int((c * u * v).sum())
        for t, (i, j) in enumerate(model.pairs):
            total += int(b[t]) * (int(u[i]) * int(v[j]) - int(u[j]) * int(v[i]))
    return total % q


def dual_basis_check(d: int, q: int) -> DualBasisReport:
    """Pair the canonical central basis against the Bockstein/cup basis.

    On the free sharp model the matrix must be the identity, and must agree
    with the closed formulas entry by entry.
    """
    model = free_level3(d, q, "sharp")
    G = model.group
    top = q_central_series(G, q).term(2)
    frame = level2_frame(G, q, preferred_parent=model.sigma)
    if frame.d != d:
        raise AssertionError("level-2 quotient rank mismatch on the free model")
    solver = transgression_solver(G, top, q, data=frame.data, space=frame.space)
    basis = canonical_basis(model)
    shapes: list[tuple[Optional[np.ndarray], Optional[tuple[np.ndarray, np.ndarray]]]] = []
    for i in range(d):
        e = np.eye(d, dtype=np.int64)[i]
        shapes.append((e, None))
    for i, j in model.pairs:
        ei = np.eye(d, dtype=np.int64)[i]
        ej = np.eye(d, dtype=np.int64)[j]
        shapes.append((None, (ei, ej)))
    n = len(basis.elements)
    mat = np.zeros((n, n), dtype=np.int64)
    formula = np.zeros((n, n), dtype=np.int64)
    for col, (lin, pr) in enumerate(shapes):
        chi_l = frame.char_of(lin) if lin is not None else None
        chi_p = (
            (frame.char_of(pr[0]), frame.char_of(pr[1])) if pr is not None else None
        )
        phi = _alpha_of_parts(frame.quotient, q, chi_l, chi_p)
        psi = solver.preimage(phi)
        if psi is None:
            raise AssertionError("basis class is not a transgression on the free model")
        for row, element in enumerate(basis.elements):
            mat[row, col] = solver.invariants.value(psi, int(element))
            formula[row, col] = closed_pairing_value(
                model,
                int(element),
                linear=lin,
                pair=(pr if pr is None else (pr[0], pr[1])),
            )
    return DualBasisReport(mat, formula)


# --------------------------------------------------------------------------
# reconstruction from kernel data


@dataclass(frozen=True, eq=False)
class Reconstruction:
    kind: str
    model_group: FiniteGroup
    annihilator: Subgroup
    data: QuotientData

    @property
    def group(self) -> FiniteGroup:
        return self.data.quotient


def inflation_kernel_symbolic(
    group: FiniteGroup, q: int, triple: DualityTriple
) -> np.ndarray:
    """Rows of Bockstein/cup coordinates spanning Ker(inf: A(G/T) → H²(G))."""
    frame = level2_frame(group, q)
    A = triple.alpha_image(frame.space)
    combos = _combo_kernel(group, q, list(A.gens), images=frame.data.projection.images)
    rows = []
    seen: set[tuple[int, ...]] = set()
    for row in combos:
        c = _combine2(frame.quotient, q, list(A.gens), row)
        coords = frame.space.coordinates_of(c)
        if any(coords) and coords not in seen:
            seen.add(coords)
            rows.append(frame.class_symbolic_coords(frame.space.representative(coords)))
    if not rows:
        return np.zeros((0, frame.symbolic.rank), dtype=np.int64)
    canon, _ = _canonical_span_basis(np.array(rows, dtype=np.int64), q)
    return canon


def reconstruct_quotient(
    d: int, q: int, triple: DualityTriple, kernel_rows: Sequence[Sequence[int]]
) -> Reconstruction:
    """Rebuild G/T₀ from the symbolic kernel data of a d-generated group.

    The kernel rows annihilate a submodule of the central part of the free
    sharp model under the closed pairing (the pairing matrix between the
    canonical central basis and the Bockstein/cup slots is the identity);
    quotienting the kind's model by that submodule recovers the group.
    """
    sym = symbolic_h2_elementary(d, q)
    rows = np.asarray(kernel_rows, dtype=np.int64).reshape(-1, sym.rank) % q
    if triple.kind == "dec-cup":
        allowed = sym.dec_rows()
    elif triple.kind == "bock":
        allowed = np.concatenate(
            [np.eye(d, dtype=np.int64), np.zeros((d, sym.rank - d), dtype=np.int64)], axis=1
        )
    else:
        allowed = np.concatenate(
            [
                sym.dec_rows(),
                np.concatenate(
                    [np.eye(d, dtype=np.int64), np.zeros((d, sym.rank - d), dtype=np.int64)],
                    axis=1,
                ),
            ],
            axis=0,
        )
    allowed_h = howell_form(_as_matrix(allowed, sym.rank, q))
    for row in rows:
        if not row_span_contains(allowed_h, row):
            raise ValueError("kernel data is not inside the coefficient submodule")
    sharp = free_level3(d, q, "sharp")
    if rows.shape[0]:
        combos = kernel(ZqMatrix(rows, q)).entries % q
    else:
        combos = np.eye(sym.rank, dtype=np.int64)
    seeds = [
        element_of(sharp, np.zeros(d, dtype=np.int64), combo[:d], combo[d:])
        for combo in combos
    ]
    if triple.kind == "dec-cup":
        flat = free_level3(d, q, "flat")
        assert flat.quotient_data is not None
        proj = flat.quotient_data.projection
        model_group = flat.group
        seeds = [int(proj(s)) for s in seeds]
    elif triple.kind == "bock":
        kill = subgroup_closure(sharp.group, sharp.commutator_central)
        qd = quotient(sharp.group, kill)
        model_group = qd.quotient
        seeds = [int(qd.projection(s)) for s in seeds]
    else:
        model_group = sharp.group
    ann = subgroup_closure(model_group, seeds)
    data = quotient(model_group, ann)
    return Reconstruction(triple.kind, model_group, ann, data)


# --------------------------------------------------------------------------
# surjectivity of α in top degree


def alpha_surjective(group: FiniteGroup, q: int, triple: DualityTriple) -> bool:
    """Whether the α-values span all of H²(G)."""
    space = h2(group, q)
    return triple.alpha_image(space).order == space.order
