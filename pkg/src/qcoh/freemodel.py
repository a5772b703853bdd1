"""Finite free models at level three: the "sharp" and "flat" quotients.

The sharp model on d generators over Z/q is the group of normal forms

    σ_1^{a_1} ··· σ_d^{a_d} · ∏_i (σ_i^q)^{c_i} · ∏_{i<j} [σ_i, σ_j]^{b_ij}

with a_i ∈ [0, q) and central coordinates c_i, b_ij ∈ Z/q.  Multiplication is
collection: moving generator letters past each other emits central commutator
factors ([σ_j, σ_i] = [σ_i, σ_j]^{-1} per swapped letter pair), and exponent
overflow past q emits central σ_i^q factors.  The commutator convention is
[h, g] = h⁻¹g⁻¹hg throughout.

The flat model is *constructed as a quotient of sharp* by the subgroup of
(δq)-th powers, δ = 2 for p = 2 and 1 otherwise — never by its own collection
law — so its correctness is inherited from sharp plus the verified quotient
machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from qcoh.groups import (
    DEFAULT_MAX_ORDER,
    FiniteGroup,
    QuotientData,
    power_subgroup,
    q_central_series,
    quotient,
    subgroup_closure,
    whole_group,
)
from qcoh.zqlin import factor_prime_power

__all__ = [
    "CanonicalBasis",
    "FreeLevel3Model",
    "NormalForm",
    "canonical_basis",
    "element_of",
    "free_level3",
    "normal_form_roundtrip",
]


def _pair_list(d: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


@dataclass(frozen=True, eq=False)
class FreeLevel3Model:
    """A finite level-3 free model with its designated generators and bases.

    ``coords[x]`` holds the normal-form coordinates of element x, laid out as
    (a_1..a_d, c_1..c_d, b_12, b_13, ..., b_{d-1,d}).  For the flat variant
    the c-block is reduced (zero when p is odd, mod 2 when p = 2).
    """

    d: int
    q: int
    p: int
    s: int
    variant: str
    group: FiniteGroup
    sigma: tuple[int, ...]
    power_central: tuple[int, ...]
    commutator_central: tuple[int, ...]
    power_labels: tuple[str, ...]
    commutator_labels: tuple[str, ...]
    coords: np.ndarray
    parent: Optional["FreeLevel3Model"] = None
    quotient_data: Optional[QuotientData] = None

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return _pair_list(self.d)

    @property
    def delta(self) -> int:
        return 2 if self.p == 2 else 1

    def __repr__(self) -> str:
        return f"FreeLevel3Model({self.variant}, d={self.d}, q={self.q}, order {self.group.order})"


@dataclass(frozen=True, eq=False)
class NormalForm:
    """Coordinates (a_i; c_i; b_ij) of one element."""

    a: tuple[int, ...]
    c: tuple[int, ...]
    b: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class CanonicalBasis:
    """The central-part basis {σ_i^q} ∪ {[σ_i, σ_j] : i < j} with coordinates."""

    model: FreeLevel3Model
    elements: tuple[int, ...]
    labels: tuple[str, ...]

    def coordinates(self, element: int) -> np.ndarray:
        """Exponent coordinates of a central element in this basis."""
        model = self.model
        row = model.coords[element]
        if row[: model.d].any():
            raise ValueError("element is not in the central part")
        return row[model.d :].copy()


def _sharp_table(d: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    pairs = _pair_list(d)
    k = 2 * d + len(pairs)
    n = q**k
    if n > DEFAULT_MAX_ORDER:
        raise ValueError(f"sharp model order {q}^{k} exceeds the cap {DEFAULT_MAX_ORDER}")
    radix = q ** np.arange(k, dtype=np.int64)
    idx = np.arange(n, dtype=np.int64)
    coords = (idx[:, None] // radix[None, :]) % q
    a_blk = coords[:, :d]
    c_blk = coords[:, d : 2 * d]
    b_blk = coords[:, 2 * d :]

    table = np.empty((n, n), dtype=np.int64)
    chunk = max(1, (1 << 21) // n)
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        a1 = a_blk[lo:hi, None, :]
        a2 = a_blk[None, :, :]
        asum = a1 + a2
        anew = asum % q
        carry = asum // q
        cnew = (c_blk[lo:hi, None, :] + c_blk[None, :, :] + carry) % q
        blocks = [anew, cnew]
        if pairs:
            kap = np.empty((hi - lo, n, len(pairs)), dtype=np.int64)
            for t, (i, j) in enumerate(pairs):
                # σ_j letters of the left factor sweep past σ_i letters of the
                # right factor and emit [σ_i, σ_j]^{-1} each
                kap[:, :, t] = -a1[:, :, j] * a2[:, :, i]
            blocks.append((b_blk[lo:hi, None, :] + b_blk[None, :, :] + kap) % q)
        table[lo:hi] = np.concatenate(blocks, axis=2) @ radix
    return table, coords


def _build_sharp(d: int, q: int) -> FreeLevel3Model:
    p, s = factor_prime_power(q)
    pairs = _pair_list(d)
    table, coords = _sharp_table(d, q)
    sigma = tuple(int(q**i) for i in range(d))
    gen_names = [f"s{i + 1}" for i in range(d)]
    group = FiniteGroup.from_table(table, generators=sigma, gen_names=gen_names, name=f"sharp({d},{q})")

    power_central = tuple(int(q ** (d + i)) for i in range(d))
    commutator_central = tuple(int(q ** (2 * d + t)) for t in range(len(pairs)))
    for i in range(d):
        assert group.power(sigma[i], q) == power_central[i], "collection power law broken"
    for t, (i, j) in enumerate(pairs):
        assert group.commutator(sigma[i], sigma[j]) == commutator_central[t], "collection commutator sign broken"

    coords = coords.copy()
    coords.flags.writeable = False
    model = FreeLevel3Model(
        d=d,
        q=q,
        p=p,
        s=s,
        variant="sharp",
        group=group,
        sigma=sigma,
        power_central=power_central,
        commutator_central=commutator_central,
        power_labels=tuple(f"s{i + 1}^{q}" for i in range(d)),
        commutator_labels=tuple(f"[s{i + 1},s{j + 1}]" for i, j in pairs),
        coords=coords,
    )
    _check_model_series(model)
    return model


def _build_flat(d: int, q: int) -> FreeLevel3Model:
    sharp = _build_sharp(d, q)
    p, s = sharp.p, sharp.s
    delta = sharp.delta
    powers = power_subgroup(sharp.group, whole_group(sharp.group), delta * q)
    data = quotient(sharp.group, powers)
    flat_group = data.quotient
    if p != 2:
        expected = q ** (d + len(sharp.pairs))
        assert flat_group.order == expected, "flat order must drop the power block"

    proj = data.projection
    sigma = tuple(proj(g) for g in sharp.sigma)
    power_central = tuple(proj(g) for g in sharp.power_central)
    commutator_central = tuple(proj(g) for g in sharp.commutator_central)

    reps = data.coset_reps
    coords = sharp.coords[reps].copy()
    if p == 2:
        coords[:, d : 2 * d] %= 2
    else:
        coords[:, d : 2 * d] = 0
    coords.flags.writeable = False

    model = FreeLevel3Model(
        d=d,
        q=q,
        p=p,
        s=s,
        variant="flat",
        group=flat_group,
        sigma=sigma,
        power_central=power_central,
        commutator_central=commutator_central,
        power_labels=tuple(f"s{i + 1}^{q}" for i in range(d)),
        commutator_labels=tuple(f"[s{i + 1},s{j + 1}]" for i, j in sharp.pairs),
        coords=coords,
        parent=sharp,
        quotient_data=data,
    )
    _check_model_series(model)
    return model


def _check_model_series(model: FreeLevel3Model) -> None:
    series = q_central_series(model.group, model.q)
    central_gens = model.power_central + model.commutator_central
    central = subgroup_closure(model.group, central_gens)
    if central.members != series.term(2).members:
        raise AssertionError("central basis must generate the level-2 term")
    if model.variant == "sharp" and not series.term(3).is_trivial():
        raise AssertionError("sharp model must have trivial level-3 term")
    if model.variant == "flat" and not series.lower3.is_trivial():
        raise AssertionError("flat model must have trivial level-3 refinement")


def free_level3(d: int, q: int, variant: str = "sharp") -> FreeLevel3Model:
    """Build the level-3 free model on d generators over Z/q."""
    if d < 1:
        raise ValueError("need at least one generator")
    if variant == "sharp":
        return _build_sharp(d, q)
    if variant == "flat":
        return _build_flat(d, q)
    raise ValueError(f"unknown variant {variant!r}; use 'sharp' or 'flat'")


def canonical_basis(model: FreeLevel3Model) -> CanonicalBasis:
    """The ordered central basis {σ_i^q} then {[σ_i, σ_j]} with coordinates.

    On the flat variant with p odd the σ_i^q entries vanish, so there is no
    such basis and this raises.
    """
    if model.variant == "flat" and model.p != 2:
        raise ValueError("flat model with p odd has no σ^q basis entries (they vanish)")
    return CanonicalBasis(
        model=model,
        elements=model.power_central + model.commutator_central,
        labels=model.power_labels + model.commutator_labels,
    )


def element_of(model: FreeLevel3Model, a: Sequence[int], c: Sequence[int], b: Sequence[int]) -> int:
    """Assemble ∏σ_i^{a_i}·∏(σ_i^q)^{c_i}·∏[σ_i,σ_j]^{b_ij} by group multiplication."""
    g = model.group
    acc = g.identity
    for i in range(model.d):
        for _ in range(int(a[i]) % model.q):
            acc = g.mul(acc, model.sigma[i])
    for i in range(model.d):
        for _ in range(int(c[i]) % model.q):
            acc = g.mul(acc, model.power_central[i])
    for t in range(len(model.pairs)):
        for _ in range(int(b[t]) % model.q):
            acc = g.mul(acc, model.commutator_central[t])
    return acc


def normal_form_roundtrip(model: FreeLevel3Model, element: int) -> NormalForm:
    """Coordinates (a_i; c_i; b_ij) of ``element``; reassembly is verified."""
    if not 0 <= element < model.group.order:
        raise ValueError("element index out of range")
    row = model.coords[element]
    d = model.d
    form = NormalForm(
        a=tuple(int(x) for x in row[:d]),
        c=tuple(int(x) for x in row[d : 2 * d]),
        b=tuple(int(x) for x in row[2 * d :]),
    )
    rebuilt = element_of(model, form.a, form.c, form.b)
    assert rebuilt == element, "normal form failed to reconstruct its element"
    return form
