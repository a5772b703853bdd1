"""Exact linear algebra over Z/q where q = p**s is a prime power.

For s > 1 the ring Z/q has zero divisors, so ordinary Gaussian elimination
neither canonicalizes row spans nor finds full kernels.  The Howell form
repairs both defects: it is the unique echelon form that is closed under the
"annihilator shifts" (q / p**v) * row, which is exactly what makes greedy
membership tests, canonical coset representatives, and kernel extraction
complete over Z/p**s.

Everything is dense ``int64`` numpy underneath.  Values are immutable after
construction and all operations are pure functions, so the whole layer is
safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

#: Largest permitted modulus.  Squares of residues must fit comfortably in
#: int64, and nothing in the workbench needs moduli beyond this.
MAX_MODULUS = 1 << 16

__all__ = [
    "MAX_MODULUS",
    "AbGroupPresentation",
    "HowellForm",
    "PairingReport",
    "SmithDecomposition",
    "ZqMatrix",
    "ZqScalar",
    "coset_reduce",
    "factor_prime_power",
    "howell_form",
    "kernel",
    "pairing_perfection",
    "row_span_contains",
    "row_span_size",
    "smith_decomposition",
    "solve",
]


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, s)`` with ``q == p**s``, ``p`` prime and ``s >= 1``.

    Raises ``ValueError`` if ``q`` is not a prime power in ``[2, MAX_MODULUS]``.
    """
    q = int(q)
    if not 2 <= q <= MAX_MODULUS:
        raise ValueError(f"modulus must lie in [2, {MAX_MODULUS}], got {q}")
    p = 2
    while q % p:
        p += 1
    s, n = 0, q
    while n % p == 0:
        n //= p
        s += 1
    if n != 1:
        raise ValueError(f"modulus {q} is not a prime power")
    return p, s


def _valuation(a: int, p: int, s: int) -> int:
    """p-adic valuation of the residue ``a``; zero gets valuation ``s``."""
    if a == 0:
        return s
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def _unit_scale_to_pivot(a: int, v: int, p: int, q: int) -> int:
    """Return a unit ``w`` with ``(w * a) % q == p**v`` for ``a`` of valuation ``v``."""
    pv = p**v
    cofactor = q // pv
    w = pow((a // pv) % cofactor, -1, cofactor) if cofactor > 1 else 1
    return w % q


@dataclass(frozen=True)
class ZqScalar:
    """A residue in Z/q with its modulus attached; q = p**s enforced."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        factor_prime_power(self.modulus)
        object.__setattr__(self, "value", int(self.value) % int(self.modulus))
        object.__setattr__(self, "modulus", int(self.modulus))

    @property
    def p(self) -> int:
        return factor_prime_power(self.modulus)[0]

    @property
    def s(self) -> int:
        return factor_prime_power(self.modulus)[1]

    @property
    def valuation(self) -> int:
        return _valuation(self.value, *factor_prime_power(self.modulus))

    @property
    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def _coerce(self, other: "ZqScalar | int") -> int:
        if isinstance(other, ZqScalar):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli in scalar arithmetic")
            return other.value
        return int(other) % self.modulus

    def __add__(self, other: "ZqScalar | int") -> "ZqScalar":
        return ZqScalar(self.value + self._coerce(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other: "ZqScalar | int") -> "ZqScalar":
        return ZqScalar(self.value - self._coerce(other), self.modulus)

    def __mul__(self, other: "ZqScalar | int") -> "ZqScalar":
        return ZqScalar(self.value * self._coerce(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self) -> "ZqScalar":
        return ZqScalar(-self.value, self.modulus)

    def inverse(self) -> "ZqScalar":
        if not self.is_unit:
            raise ValueError(f"{self.value} is not a unit mod {self.modulus}")
        return ZqScalar(pow(self.value, -1, self.modulus), self.modulus)

    def __int__(self) -> int:
        return self.value


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ZqMatrix:
    """Immutable dense matrix over Z/q, entries stored as int64 residues."""

    entries: np.ndarray
    modulus: int

    def __post_init__(self) -> None:
        factor_prime_power(self.modulus)
        arr = np.asarray(self.entries, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError(f"matrix entries must be 2-dimensional, got shape {arr.shape}")
        object.__setattr__(self, "entries", _freeze(np.mod(arr, self.modulus)))
        object.__setattr__(self, "modulus", int(self.modulus))

    # -- construction -----------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int, q: int) -> "ZqMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), q)

    @classmethod
    def identity(cls, n: int, q: int) -> "ZqMatrix":
        return cls(np.eye(n, dtype=np.int64), q)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int, q: int) -> "ZqMatrix":
        """Build from an iterable of row vectors; ``cols`` disambiguates the empty case."""
        rows = [np.asarray(r, dtype=np.int64) for r in rows]
        if not rows:
            return cls.zeros(0, cols, q)
        mat = np.vstack(rows)
        if mat.shape[1] != cols:
            raise ValueError(f"expected rows of length {cols}, got {mat.shape[1]}")
        return cls(mat, q)

    # -- shape ------------------------------------------------------------
    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def T(self) -> "ZqMatrix":
        return ZqMatrix(self.entries.T, self.modulus)

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "ZqMatrix") -> None:
        if not isinstance(other, ZqMatrix) or other.modulus != self.modulus:
            raise ValueError("mixed moduli in matrix arithmetic")

    def __add__(self, other: "ZqMatrix") -> "ZqMatrix":
        self._check(other)
        return ZqMatrix(self.entries + other.entries, self.modulus)

    def __sub__(self, other: "ZqMatrix") -> "ZqMatrix":
        self._check(other)
        return ZqMatrix(self.entries - other.entries, self.modulus)

    def __matmul__(self, other: "ZqMatrix") -> "ZqMatrix":
        self._check(other)
        return ZqMatrix(self.entries @ other.entries, self.modulus)

    def scale(self, c: int) -> "ZqMatrix":
        return ZqMatrix(self.entries * (int(c) % self.modulus), self.modulus)

    def apply(self, vec: Sequence[int]) -> np.ndarray:
        """Matrix-vector product ``M @ vec`` reduced mod q."""
        v = np.asarray(vec, dtype=np.int64)
        if v.shape != (self.cols,):
            raise ValueError(f"expected vector of length {self.cols}, got shape {v.shape}")
        return (self.entries @ v) % self.modulus

    def row(self, i: int) -> np.ndarray:
        return self.entries[i].copy()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ZqMatrix)
            and other.modulus == self.modulus
            and other.entries.shape == self.entries.shape
            and bool(np.array_equal(other.entries, self.entries))
        )

    def __repr__(self) -> str:
        return f"ZqMatrix({self.entries.tolist()!r}, mod {self.modulus})"


def hstack(left: ZqMatrix, right: ZqMatrix) -> ZqMatrix:
    if left.modulus != right.modulus or left.rows != right.rows:
        raise ValueError("hstack shape/modulus mismatch")
    return ZqMatrix(np.hstack([left.entries, right.entries]), left.modulus)


def vstack(top: ZqMatrix, bottom: ZqMatrix) -> ZqMatrix:
    if top.modulus != bottom.modulus or top.cols != bottom.cols:
        raise ValueError("vstack shape/modulus mismatch")
    return ZqMatrix(np.vstack([top.entries, bottom.entries]), top.modulus)


@dataclass(frozen=True, eq=False)
class HowellForm:
    """Canonical row-reduced form ``matrix`` plus the row-operation record.

    ``transform @ input == matrix`` (mod q); equality of row spans and
    canonicity (same span => same ``matrix``) are the defining guarantees.
    """

    matrix: ZqMatrix
    transform: ZqMatrix

    @property
    def modulus(self) -> int:
        return self.matrix.modulus

    @property
    def pivots(self) -> tuple[tuple[int, int, int], ...]:
        """Tuples ``(row, col, pivot_value)``; pivot values are p-powers."""
        return _pivots_of(self.matrix.entries)


def _pivots_of(h: np.ndarray) -> tuple[tuple[int, int, int], ...]:
    out = []
    for i in range(h.shape[0]):
        nz = np.flatnonzero(h[i])
        if nz.size == 0:  # pragma: no cover - canonical forms carry no zero rows
            continue
        j = int(nz[0])
        out.append((i, j, int(h[i, j])))
    return tuple(out)


def howell_form(matrix: ZqMatrix) -> HowellForm:
    """Canonical Howell form of ``matrix`` with its transform record.

    The form is echelon with p-power pivots, entries above each pivot reduced
    below it, and — the step beyond Hermite — for every pivot p**v with v > 0
    the shifted row (q / p**v) * row folded back into the span closure.  Two
    inputs with equal row span produce the identical form, and the form is a
    fixed point of this function.
    """
    q = matrix.modulus
    p, s = factor_prime_power(q)
    n, m = matrix.rows, matrix.cols

    # Work rows carry the combination record in columns m .. m+n.
    pool: list[np.ndarray] = []
    for i in range(n):
        row = np.zeros(m + n, dtype=np.int64)
        row[:m] = matrix.entries[i]
        row[m + i] = 1
        pool.append(row)

    done: list[np.ndarray] = []
    done_pivots: list[tuple[int, int]] = []  # (col, pivot value)
    for j in range(m):
        # invariant: every pool row is zero in columns < j
        candidates = [(idx, _valuation(int(r[j]), p, s)) for idx, r in enumerate(pool) if r[j]]
        if not candidates:
            continue
        k, v = min(candidates, key=lambda t: t[1])
        piv = pool.pop(k)
        piv = (piv * _unit_scale_to_pivot(int(piv[j]), v, p, q)) % q
        pv = p**v
        for r in pool:
            if r[j]:
                r -= (int(r[j]) // pv) * piv
                r %= q
        done.append(piv)
        done_pivots.append((j, pv))
        if v > 0:
            shifted = (piv * (q // pv)) % q
            if shifted[:m].any():
                pool.append(shifted)

    # Reduce entries above each pivot into [0, pivot).
    for k in range(len(done)):
        j, pv = done_pivots[k]
        for i in range(k):
            f = int(done[i][j]) // pv
            if f:
                done[i] = (done[i] - f * done[k]) % q

    if done:
        stacked = np.vstack(done)
        h, u = stacked[:, :m], stacked[:, m:]
    else:
        h = np.zeros((0, m), dtype=np.int64)
        u = np.zeros((0, n), dtype=np.int64)
    return HowellForm(ZqMatrix(h, q), ZqMatrix(u, q))


def _as_howell(mat: "ZqMatrix | HowellForm") -> HowellForm:
    return mat if isinstance(mat, HowellForm) else howell_form(mat)


def coset_reduce(mat: "ZqMatrix | HowellForm", vec: Sequence[int]) -> np.ndarray:
    """Canonical representative of ``vec`` modulo the row span of ``mat``.

    Two vectors reduce to the same output iff their difference lies in the
    span; in particular membership is ``coset_reduce(mat, v).any() == False``.
    """
    hf = _as_howell(mat)
    q = hf.modulus
    h = hf.matrix.entries
    r = np.mod(np.asarray(vec, dtype=np.int64), q)
    if r.shape != (hf.matrix.cols,):
        raise ValueError(f"expected vector of length {hf.matrix.cols}, got shape {r.shape}")
    for i, j, pv in hf.pivots:
        f = int(r[j]) // pv
        if f:
            r = (r - f * h[i]) % q
    return r


def row_span_contains(mat: "ZqMatrix | HowellForm", vec: Sequence[int]) -> bool:
    return not coset_reduce(mat, vec).any()


def row_span_size(mat: "ZqMatrix | HowellForm") -> int:
    """Number of distinct vectors in the row span."""
    hf = _as_howell(mat)
    q = hf.modulus
    size = 1
    for _, _, pv in hf.pivots:
        size *= q // pv
    return size


def solve(matrix: ZqMatrix, rhs: Sequence[int]) -> Optional[np.ndarray]:
    """A solution ``x`` of ``matrix @ x == rhs`` (mod q), or None if none exists.

    The returned vector is verified by substitution before being handed back.
    """
    q = matrix.modulus
    b = np.mod(np.asarray(rhs, dtype=np.int64), q)
    if b.shape != (matrix.rows,):
        raise ValueError(f"expected right-hand side of length {matrix.rows}, got shape {b.shape}")
    hf = howell_form(matrix.T)
    h = hf.matrix.entries
    coeffs = np.zeros(h.shape[0], dtype=np.int64)
    r = b.copy()
    for i, j, pv in hf.pivots:
        a = int(r[j])
        if a % pv:
            return None
        coeffs[i] = a // pv
        r = (r - coeffs[i] * h[i]) % q
    if r.any():
        return None
    x = (coeffs @ hf.transform.entries) % q
    assert np.array_equal(matrix.apply(x), b), "solver postcondition violated"
    return x


def kernel(matrix: ZqMatrix) -> ZqMatrix:
    """Rows generating ``{x : matrix @ x == 0 (mod q)}``.

    Works on the augmented block [Mᵀ | I]: in its Howell form, rows whose
    Mᵀ-block vanishes record exactly the combinations spanning the kernel
    (the annihilator-closure property is what makes this complete over Z/p**s).
    """
    q = matrix.modulus
    nvars = matrix.cols
    aug = np.hstack([matrix.entries.T, np.eye(nvars, dtype=np.int64)])
    hf = howell_form(ZqMatrix(aug, q))
    h = hf.matrix.entries
    if h.shape[0] == 0:
        return ZqMatrix.identity(nvars, q)
    zero_block = ~h[:, : matrix.rows].any(axis=1)
    gens = h[zero_block, matrix.rows :]
    return ZqMatrix(gens.reshape(-1, nvars), q)


@dataclass(frozen=True, eq=False)
class SmithDecomposition:
    """Diagonalization ``row_transform @ M @ col_transform == diagonal`` over Z/q.

    Both transforms are invertible mod q; ``col_transform_inv`` is maintained
    alongside so basis vectors can be pulled back without a separate solve.
    Diagonal entries are p-powers (or 0) with non-decreasing valuation.
    """

    diagonal: ZqMatrix
    row_transform: ZqMatrix
    col_transform: ZqMatrix
    col_transform_inv: ZqMatrix

    @property
    def modulus(self) -> int:
        return self.diagonal.modulus


def smith_decomposition(matrix: ZqMatrix) -> SmithDecomposition:
    """Smith-style diagonalization over the chain ring Z/p**s."""
    q = matrix.modulus
    p, s = factor_prime_power(q)
    a = matrix.entries.copy()
    n, m = a.shape
    u = np.eye(n, dtype=np.int64)
    v = np.eye(m, dtype=np.int64)
    vi = np.eye(m, dtype=np.int64)

    for t in range(min(n, m)):
        sub = a[t:, t:]
        if not sub.any():
            break
        # Global minimum valuation in the remaining block makes every later
        # entry divisible by the pivot, so elimination is exact.
        flat_vals = np.array(
            [_valuation(int(x), p, s) for x in sub.ravel()], dtype=np.int64
        ).reshape(sub.shape)
        bi, bj = np.unravel_index(int(np.argmin(flat_vals)), sub.shape)
        bi, bj = bi + t, bj + t
        if bi != t:
            a[[t, bi]] = a[[bi, t]]
            u[[t, bi]] = u[[bi, t]]
        if bj != t:
            a[:, [t, bj]] = a[:, [bj, t]]
            v[:, [t, bj]] = v[:, [bj, t]]
            vi[[t, bj]] = vi[[bj, t]]
        val = _valuation(int(a[t, t]), p, s)
        w = _unit_scale_to_pivot(int(a[t, t]), val, p, q)
        if w != 1:
            a[t] = (a[t] * w) % q
            u[t] = (u[t] * w) % q
        pv = p**val
        for i in range(n):
            if i != t and a[i, t]:
                f = int(a[i, t]) // pv
                a[i] = (a[i] - f * a[t]) % q
                u[i] = (u[i] - f * u[t]) % q
        for j in range(m):
            if j != t and a[t, j]:
                f = int(a[t, j]) // pv
                a[:, j] = (a[:, j] - f * a[:, t]) % q
                v[:, j] = (v[:, j] - f * v[:, t]) % q
                vi[t] = (vi[t] + f * vi[j]) % q

    dec = SmithDecomposition(
        ZqMatrix(a, q), ZqMatrix(u, q), ZqMatrix(v, q), ZqMatrix(vi, q)
    )
    assert dec.row_transform @ matrix @ dec.col_transform == dec.diagonal
    assert dec.col_transform @ dec.col_transform_inv == ZqMatrix.identity(m, q)
    return dec


@dataclass(frozen=True, eq=False)
class AbGroupPresentation:
    """Finite abelian group of exponent dividing q, given by generators and relations.

    The module is (Z/q)^ngens modulo the row span of ``relations``.  The
    invariant-factor decomposition (cyclic orders p**k, ascending, trivial
    factors dropped) is computed at construction; ``coordinates`` maps an
    ambient vector to its invariant-factor coordinates, with ``basis_images``
    giving the cyclic generators back in ambient coordinates.
    """

    ngens: int
    modulus: int
    relations: ZqMatrix
    invariant_factors: tuple[int, ...]
    basis_images: ZqMatrix
    _coordinate_map: ZqMatrix

    @classmethod
    def from_relations(
        cls, ngens: int, q: int, relation_rows: "Iterable[Sequence[int]] | ZqMatrix"
    ) -> "AbGroupPresentation":
        if isinstance(relation_rows, ZqMatrix):
            rel = relation_rows
        else:
            rel = ZqMatrix.from_rows(relation_rows, ngens, q)
        if rel.cols != ngens:
            raise ValueError(f"relations have {rel.cols} columns, expected {ngens}")
        p, s = factor_prime_power(q)
        dec = smith_decomposition(rel)
        diag = dec.diagonal.entries
        orders: list[int] = []
        slots: list[int] = []
        for j in range(ngens):
            d = int(diag[j, j]) if j < min(rel.rows, ngens) else 0
            k = _valuation(d, p, s)
            if k > 0:
                orders.append(p**k)
                slots.append(j)
        images = dec.col_transform_inv.entries[slots, :].reshape(len(slots), ngens)
        coord_cols = dec.col_transform.entries[:, slots].reshape(ngens, len(slots))
        return cls(
            ngens=ngens,
            modulus=q,
            relations=rel,
            invariant_factors=tuple(orders),
            basis_images=ZqMatrix(images, q),
            _coordinate_map=ZqMatrix(coord_cols, q),
        )

    @property
    def order(self) -> int:
        n = 1
        for f in self.invariant_factors:
            n *= f
        return n

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def coordinates(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Invariant-factor coordinates of an ambient vector; zero iff trivial image."""
        v = np.mod(np.asarray(vec, dtype=np.int64), self.modulus)
        if v.shape != (self.ngens,):
            raise ValueError(f"expected vector of length {self.ngens}, got shape {v.shape}")
        raw = (v @ self._coordinate_map.entries) % self.modulus
        return tuple(int(c) % f for c, f in zip(raw, self.invariant_factors))

    def is_zero_element(self, vec: Sequence[int]) -> bool:
        return all(c == 0 for c in self.coordinates(vec))


@dataclass(frozen=True, eq=False)
class PairingReport:
    """Outcome of a bilinear-pairing perfection check.

    ``matrix`` tabulates the pairing on the chosen generators of the two
    sides; the annihilators list generator vectors (left side in A's ambient
    coordinates, right side in B's) for the elements pairing to zero with
    everything opposite.  ``perfect`` means the induced map A -> Hom(B, Z/q)
    is bijective.
    """

    matrix: ZqMatrix
    perfect: bool
    left_order: int
    right_order: int
    left_annihilator: tuple[tuple[int, ...], ...]
    right_annihilator: tuple[tuple[int, ...], ...]

    @property
    def modulus(self) -> int:
        return self.matrix.modulus


def _annihilator_generators(
    pairing_kernel: ZqMatrix, relations: ZqMatrix
) -> tuple[tuple[int, ...], ...]:
    """Nonzero canonical representatives of the kernel generators modulo relations."""
    rel_h = howell_form(relations)
    seen: set[tuple[int, ...]] = set()
    out: list[tuple[int, ...]] = []
    for i in range(pairing_kernel.rows):
        rep = coset_reduce(rel_h, pairing_kernel.entries[i])
        key = tuple(int(x) for x in rep)
        if any(key) and key not in seen:
            seen.add(key)
            out.append(key)
    return tuple(out)


def pairing_perfection(
    pairing: ZqMatrix, a: AbGroupPresentation, b: AbGroupPresentation
) -> PairingReport:
    """Check whether the bilinear map tabulated by ``pairing`` is perfect.

    ``pairing[i, j]`` is the value on (i-th generator of ``a``, j-th generator
    of ``b``).  The table must kill both relation spans (checked; ValueError
    otherwise).  Perfection holds iff both annihilators are trivial and the
    two sides have equal order.
    """
    if a.modulus != pairing.modulus or b.modulus != pairing.modulus:
        raise ValueError("pairing and presentations must share one modulus")
    if pairing.rows != a.ngens or pairing.cols != b.ngens:
        raise ValueError(
            f"pairing is {pairing.rows}x{pairing.cols}, expected {a.ngens}x{b.ngens}"
        )
    q = pairing.modulus
    left_compat = (a.relations.entries @ pairing.entries) % q
    if left_compat.any():
        raise ValueError("pairing does not respect the left-hand relations")
    right_compat = (pairing.entries @ b.relations.entries.T) % q
    if right_compat.any():
        raise ValueError("pairing does not respect the right-hand relations")

    left_ann = _annihilator_generators(kernel(pairing.T), a.relations)
    right_ann = _annihilator_generators(kernel(pairing), b.relations)
    perfect = not left_ann and not right_ann and a.order == b.order
    return PairingReport(
        matrix=pairing,
        perfect=perfect,
        left_order=a.order,
        right_order=b.order,
        left_annihilator=left_ann,
        right_annihilator=right_ann,
    )
