"""Independent brute-force reference implementations.

Everything here is deliberately naive — exhaustive enumeration and BFS
closures — so the fast library code can be checked against answers computed
a completely different way.
"""

from __future__ import annotations

import itertools

import numpy as np


def all_vectors(q: int, n: int):
    """Every vector in (Z/q)^n, as int64 arrays."""
    for tup in itertools.product(range(q), repeat=n):
        yield np.array(tup, dtype=np.int64)


def span_closure(rows, q: int, cols: int) -> set[tuple[int, ...]]:
    """The additive closure of the given row vectors inside (Z/q)^cols."""
    zero = (0,) * cols
    span = {zero}
    frontier = [zero]
    gens = [tuple(int(x) % q for x in r) for r in rows]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = tuple((a + b) % q for a, b in zip(x, g))
            if y not in span:
                span.add(y)
                frontier.append(y)
    return span


def brute_solutions(mat, rhs, q: int) -> list[tuple[int, ...]]:
    """All x with mat @ x == rhs (mod q), found by exhaustive search."""
    mat = np.asarray(mat, dtype=np.int64)
    rhs = np.mod(np.asarray(rhs, dtype=np.int64), q)
    out = []
    for x in itertools.product(range(q), repeat=mat.shape[1]):
        xv = np.array(x, dtype=np.int64)
        if np.array_equal((mat @ xv) % q, rhs):
            out.append(x)
    return out


def brute_kernel(mat, q: int) -> set[tuple[int, ...]]:
    """All x with mat @ x == 0 (mod q)."""
    mat = np.asarray(mat, dtype=np.int64)
    zero = np.zeros(mat.shape[0], dtype=np.int64)
    return set(brute_solutions(mat, zero, q))


# ---------------------------------------------------------------------------
# group-theoretic oracles (plain python loops over full tables)


def table_is_associative(table) -> bool:
    """Full n³ triple check."""
    table = np.asarray(table)
    n = table.shape[0]
    for x in range(n):
        for y in range(n):
            xy = table[x, y]
            for z in range(n):
                if table[xy, z] != table[x, table[y, z]]:
                    return False
    return True


def closure_of(table, identity: int, seeds) -> frozenset[int]:
    """Subgroup closure by repeated pairwise products."""
    table = np.asarray(table)
    members = {int(identity), *(int(s) for s in seeds)}
    while True:
        fresh = {int(table[x, y]) for x in members for y in members} - members
        if not fresh:
            return frozenset(members)
        members |= fresh


def power_elements(table, identity: int, members, m: int) -> set[int]:
    """{x^m : x in members} by repeated multiplication."""
    table = np.asarray(table)
    out = set()
    for x in members:
        acc = int(identity)
        for _ in range(m):
            acc = int(table[acc, x])
        out.add(acc)
    return out


def commutator_elements(table, inverses, left, right) -> set[int]:
    """{x⁻¹y⁻¹xy : x in left, y in right}."""
    table = np.asarray(table)
    inverses = np.asarray(inverses)
    out = set()
    for x in left:
        for y in right:
            out.add(int(table[table[table[inverses[x], inverses[y]], x], y]))
    return out


def brute_hom_count(src_table, src_identity, src_gens, tgt_table, tgt_identity,
                    surjective_only=False) -> int:
    """Count homomorphisms by exhaustive search over all generator images."""
    import itertools as it

    src_table = np.asarray(src_table)
    tgt_table = np.asarray(tgt_table)
    n, m = src_table.shape[0], tgt_table.shape[0]
    # breadth-first words for every source element
    word = {int(src_identity): ()}
    frontier = [int(src_identity)]
    while frontier:
        nxt = []
        for x in frontier:
            for pos, g in enumerate(src_gens):
                y = int(src_table[x, g])
                if y not in word:
                    word[y] = word[x] + (pos,)
                    nxt.append(y)
        frontier = nxt
    assert len(word) == n, "generators must generate"

    count = 0
    for assignment in it.product(range(m), repeat=len(src_gens)):
        phi = {}
        for x, w in word.items():
            acc = int(tgt_identity)
            for pos in w:
                acc = int(tgt_table[acc, assignment[pos]])
            phi[x] = acc
        ok = all(
            phi[int(src_table[x, y])] == int(tgt_table[phi[x], phi[y]])
            for x in range(n)
            for y in range(n)
        )
        if ok and (not surjective_only or len(set(phi.values())) == m):
            count += 1
    return count


def _h2_pair_slots(n: int, identity: int):
    """Variable layout for a normalized pair table: one slot per pair of
    non-identity elements, row-major."""
    others = [g for g in range(n) if g != identity]
    col = {g: i for i, g in enumerate(others)}
    return others, col


def brute_h2_spans(table, identity: int, q: int):
    """Cocycle and coboundary spans computed the slow, obvious way.

    One unknown per ordered pair of non-identity elements; every one of the
    n**3 associativity constraints

        c(y,z) - c(xy,z) + c(x,yz) - c(x,y) == 0   (mod q)

    is written down explicitly and the kernel taken.  Coboundaries come from
    the indicator functions of the non-identity elements.  The row reduction
    itself is delegated to ``qcoh.zqlin`` (which has its own exhaustive
    tests); everything specific to cohomology is built here from scratch.

    Returns ``(slots, cocycles, coboundaries)`` where ``slots`` maps a
    variable index back to its ``(g, h)`` pair and the other two are
    ``ZqMatrix`` row generators in variable coordinates.
    """
    from qcoh import zqlin

    table = np.asarray(table, dtype=np.int64)
    n = table.shape[0]
    e = int(identity)
    others, col = _h2_pair_slots(n, e)
    w = len(others)
    m = w * w

    def slot(a: int, b: int) -> int:
        return col[a] * w + col[b]

    rows = np.zeros((n * n * n, m), dtype=np.int64)
    r = 0
    for x in range(n):
        for y in range(n):
            xy = int(table[x, y])
            for z in range(n):
                for sign, a, b in (
                    (1, y, z),
                    (-1, xy, z),
                    (1, x, int(table[y, z])),
                    (-1, x, y),
                ):
                    if a != e and b != e:
                        rows[r, slot(a, b)] += sign
                r += 1
    rows = np.unique(rows % q, axis=0)
    rows = rows[rows.any(axis=1)]
    zmat = zqlin.kernel(zqlin.ZqMatrix(rows.reshape(-1, m), q))

    brows = np.zeros((w, m), dtype=np.int64)
    for i, g in enumerate(others):
        for a in others:
            for b in others:
                val = (a == g) + (b == g) - (int(table[a, b]) == g)
                brows[i, slot(a, b)] = val % q
    bmat = zqlin.ZqMatrix(brows, q)

    slots = [(g, h) for g in others for h in others]
    return slots, zmat, bmat


def brute_h2_invariant_factors(table, identity: int, q: int) -> tuple[int, ...]:
    """Invariant factors of the second cohomology group, from the full spans."""
    from qcoh import zqlin

    _, zmat, bmat = brute_h2_spans(table, identity, q)
    k = zmat.rows
    stacked = zqlin.vstack(zmat, bmat)
    combos = zqlin.kernel(stacked.T)
    relations = combos.entries[:, :k].reshape(-1, k)
    pres = zqlin.AbGroupPresentation.from_relations(k, q, relations)
    quotient = zqlin.row_span_size(stacked) // zqlin.row_span_size(bmat)
    assert pres.order == quotient, "presentation disagrees with span counting"
    return pres.invariant_factors


def brute_h2_order_tiny(table, identity: int, q: int) -> int:
    """|H^2| by enumerating every normalized pair table.  No linear algebra
    at all, so only usable when q**((n-1)**2) is small."""
    table = np.asarray(table, dtype=np.int64)
    n = table.shape[0]
    e = int(identity)
    others, col = _h2_pair_slots(n, e)
    w = len(others)
    assert q ** (w * w) <= 1 << 21, "too many cochains to enumerate"

    def value(vec, a, b):
        if a == e or b == e:
            return 0
        return vec[col[a] * w + col[b]]

    cocycles = []
    for vec in all_vectors(q, w * w):
        ok = all(
            (
                value(vec, y, z)
                - value(vec, int(table[x, y]), z)
                + value(vec, x, int(table[y, z]))
                - value(vec, x, y)
            )
            % q
            == 0
            for x in range(n)
            for y in range(n)
            for z in range(n)
        )
        if ok:
            cocycles.append(tuple(int(v) for v in vec))

    coboundaries = set()
    for u in all_vectors(q, w):
        vals = {g: int(u[i]) for i, g in enumerate(others)}
        vals[e] = 0
        tab = tuple(
            (vals[a] + vals[b] - vals[int(table[a, b])]) % q
            for a in others
            for b in others
        )
        coboundaries.add(tab)
    assert coboundaries <= set(cocycles)
    return len(cocycles) // len(coboundaries)
