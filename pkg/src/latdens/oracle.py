"""Brute-force verification oracle.

Counts solutions of X^T G X = G mod p^N by a depth-first Hensel lifting
tree (exact pruning, no smoothness assumptions at p = 2), and searches
exhaustively for low-precision isometries between small unimodular blocks.
Deliberately independent of the lattice/density modules it cross-checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .base_ring import KappaElem, RingDescriptor, RingElem, kappa_linear_solve, unramified


class BudgetExceeded(RuntimeError):
    """The requested enumeration exceeds the allowed search budget."""


class NotStabilized(RuntimeError):
    """The count ratios did not plateau within the computed levels."""


_NODE_LIMIT = 5_000_000


@dataclass(frozen=True)
class _Ctx:
    p: int
    f: int
    n: int
    levels: int
    modulus: tuple[int, ...] | None  # None when f == 1
    pn: int                          # p ** levels

    @property
    def q(self) -> int:
        return self.p ** self.f


@dataclass(frozen=True)
class LiftNode:
    """A partial solution: matrix entries are coefficient tuples mod p^level."""

    level: int
    matrix: tuple[tuple[tuple[int, ...], ...], ...]


# -- entry arithmetic (length-f integer coefficient tuples) ---------------


def _e_add(a, b, ctx, m):
    return tuple((x + y) % m for x, y in zip(a, b))


def _e_sub(a, b, ctx, m):
    return tuple((x - y) % m for x, y in zip(a, b))


def _e_mul(a, b, ctx, m):
    f = ctx.f
    if f == 1:
        return ((a[0] * b[0]) % m,)
    prod = [0] * (2 * f - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    mod = ctx.modulus
    for d in range(2 * f - 2, f - 1, -1):
        c = prod[d]
        if c:
            prod[d] = 0
            for k in range(f):
                prod[d - f + k] -= c * mod[k]
    return tuple(c % m for c in prod[:f])


def _zero_entry(ctx):
    return (0,) * ctx.f


def _mat_mul(A, B, ctx, m):
    n = ctx.n
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = _zero_entry(ctx)
            for k in range(n):
                acc = _e_add(acc, _e_mul(A[i][k], B[k][j], ctx, m), ctx, m)
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _transpose(A):
    n = len(A)
    return tuple(tuple(A[j][i] for j in range(n)) for i in range(n))


def _residue_bits(entry, ctx) -> int:
    """Residue of an entry: kappa bits at p = 2, an integer mod p otherwise."""
    if ctx.p == 2:
        bits = 0
        for j, c in enumerate(entry):
            if c & 1:
                bits |= 1 << j
        return bits
    return entry[0] % ctx.p


# -- residue-field helpers -------------------------------------------------


def _kappa_mul_table(ctx) -> list[list[int]]:
    q = ctx.q
    if ctx.f == 1:
        return [[(a * b) % ctx.p for b in range(q)] for a in range(q)]
    mbits = 0
    for j, c in enumerate(ctx.modulus):
        if c & 1:
            mbits |= 1 << j
    table = []
    for a in range(q):
        row = []
        for b in range(q):
            x, y, r = a, b, 0
            while y:
                if y & 1:
                    r ^= x
                x <<= 1
                y >>= 1
            dm = ctx.f
            while r.bit_length() - 1 >= dm and r:
                r ^= mbits << (r.bit_length() - 1 - dm)
            row.append(r)
        table.append(row)
    return table


def _res_add(a: int, b: int, ctx) -> int:
    return a ^ b if ctx.p == 2 else (a + b) % ctx.p


def _res_sub(a: int, b: int, ctx) -> int:
    return a ^ b if ctx.p == 2 else (a - b) % ctx.p


def _lift_res(bits: int, ctx) -> tuple[int, ...]:
    """Canonical integer-tuple lift of a residue element."""
    if ctx.p == 2:
        return tuple((bits >> j) & 1 for j in range(ctx.f))
    return (bits % ctx.p,) + (0,) * (ctx.f - 1)


def _gauss_mod_p(rows: list[list[int]], rhs: list[int], p: int, ncols: int):
    """Solve over F_p for odd p; mirrors kappa_linear_solve's return shape."""
    m = len(rows)
    work = [list(r) for r in rows]
    b = list(rhs)
    pivots: list[tuple[int, int]] = []
    prow = 0
    for col in range(ncols):
        sel = next((r for r in range(prow, m) if work[r][col] % p), None)
        if sel is None:
            continue
        work[prow], work[sel] = work[sel], work[prow]
        b[prow], b[sel] = b[sel], b[prow]
        inv = pow(work[prow][col], -1, p)
        work[prow] = [(inv * x) % p for x in work[prow]]
        b[prow] = (inv * b[prow]) % p
        for r in range(m):
            if r != prow and work[r][col] % p:
                c = work[r][col]
                work[r] = [(x - c * y) % p for x, y in zip(work[r], work[prow])]
                b[r] = (b[r] - c * b[prow]) % p
        pivots.append((prow, col))
        prow += 1
        if prow == m:
            break
    for r in range(prow, m):
        if b[r] % p:
            return [], None
    particular = [0] * ncols
    for r, c in pivots:
        particular[c] = b[r]
    pivot_cols = {c for _, c in pivots}
    kernel = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        vec = [0] * ncols
        vec[free] = 1
        for r, c in pivots:
            vec[c] = (-work[r][free]) % p
        kernel.append(vec)
    return kernel, particular


# -- input normalization ----------------------------------------------------


def _normalize_gram(gram, p: int, levels: int, ring: RingDescriptor | None):
    rows = list(gram)
    n = len(rows)
    if n == 0:
        raise ValueError("empty Gram matrix")
    first = rows[0][0]
    desc: RingDescriptor | None = ring
    if isinstance(first, RingElem):
        desc = first.desc
    f = desc.degree if desc is not None else 1
    if p != 2 and f != 1:
        raise ValueError("ring extensions are supported at p = 2 only")
    pn = p ** levels
    ctx = _Ctx(p, f, n, levels, desc.modulus if desc is not None and f > 1 else None, pn)

    def convert(x):
        if isinstance(x, RingElem):
            return tuple(c % pn for c in x.integer_coeffs(levels))
        if isinstance(x, int) and not isinstance(x, bool):
            return (x % pn,) + (0,) * (f - 1)
        if isinstance(x, (list, tuple)) and len(x) == f:
            return tuple(int(c) % pn for c in x)
        raise ValueError(f"oracle needs integral Gram entries, got {x!r}")

    G = tuple(tuple(convert(x) for x in row) for row in rows)
    for row in G:
        if len(row) != n:
            raise ValueError("Gram matrix is not square")
    for i in range(n):
        for j in range(n):
            if G[i][j] != G[j][i]:
                raise ValueError("Gram matrix is not symmetric")
    return ctx, G


def _span_entries(gram, ctx, bits: int) -> tuple:
    """Entries as integer tuples trusted modulo 2^bits (scale-span bookkeeping)."""
    out = []
    for row in gram:
        r = []
        for x in row:
            if isinstance(x, RingElem):
                r.append(tuple(x.integer_coeffs(bits)))
            elif isinstance(x, int):
                r.append((x,) + (0,) * (ctx.f - 1))
            else:
                r.append(tuple(int(c) for c in x))
        out.append(tuple(r))
    return tuple(out)


def _vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _exact_poly_mul(a, b, ctx):
    f = ctx.f
    if f == 1:
        return (a[0] * b[0],)
    prod = [0] * (2 * f - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    for d in range(2 * f - 2, f - 1, -1):
        c = prod[d]
        if c:
            prod[d] = 0
            for k in range(f):
                prod[d - f + k] -= c * ctx.modulus[k]
    return tuple(prod[:f])


def _exact_minor(G, rows, cols, ctx):
    """Exact determinant of a square submatrix, by permutation expansion."""
    k = len(rows)
    acc = (0,) * ctx.f
    for perm in itertools.permutations(range(k)):
        sign = 1
        seen = list(perm)
        for i in range(k):
            for j in range(i + 1, k):
                if seen[i] > seen[j]:
                    sign = -sign
        term = (sign,) + (0,) * (ctx.f - 1)
        for i in range(k):
            term = _exact_poly_mul(term, G[rows[i]][cols[perm[i]]], ctx)
        acc = tuple(x + y for x, y in zip(acc, term))
    return acc


def _scale_span(gram, ctx) -> int:
    """Spread of the elementary divisor valuations, via determinant divisors.

    Minor valuations are capped at levels + 3: beyond that the span cannot
    influence stabilization within the level budget anyway.
    """
    cap = ctx.levels + 3
    G = _span_entries(gram, ctx, cap)
    n = ctx.n
    dvals = [0]
    for k in range(1, n + 1):
        best = cap
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                m = _exact_minor(G, rows, cols, ctx)
                nz = [c for c in m if c]
                if nz:
                    v = min(_vp(abs(c), ctx.p) for c in nz)
                    best = min(best, v)
        if k == n and best >= cap:
            raise ValueError(
                "Gram determinant not certified nonzero within the level budget")
        dvals.append(best)
    evals = [dvals[k] - dvals[k - 1] for k in range(1, n + 1)]
    return max(evals) - min(evals)


# -- the lifting tree -------------------------------------------------------


def _root_matrices(G, ctx):
    """All residue matrices X with X^T G X = G over the residue field."""
    n, q = ctx.n, ctx.q
    table = _kappa_mul_table(ctx)
    Gres = [[_residue_bits(G[i][j], ctx) for j in range(n)] for i in range(n)]
    roots = []
    for flat in itertools.product(range(q), repeat=n * n):
        X = [flat[i * n:(i + 1) * n] for i in range(n)]
        ok = True
        for j in range(n):
            for l in range(j, n):
                acc = 0
                for r in range(n):
                    for s in range(n):
                        acc = _res_add(acc, table[X[r][j]][table[Gres[r][s]][X[s][l]]], ctx)
                if acc != Gres[j][l]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            roots.append(tuple(tuple(_lift_res(x, ctx) for x in row) for row in X))
    return roots


def _lift_step(G, X, k, ctx, target=None):
    """Children of a level-k node, or a closed-form tail for odd p.

    Returns ("dead",), ("children", [matrices]), or ("tail", width) where the
    subtree contributes width^(j-k) solutions at every deeper level j.
    """
    n, p, f = ctx.n, ctx.p, ctx.f
    tgt = target if target is not None else G
    pk = p ** k
    m = pk * p
    GX = _mat_mul(G, X, ctx, m)
    XtGX = _mat_mul(_transpose(X), GX, ctx, m)
    nvars = n * n
    rows, rhs = [], []
    for j in range(n):
        for l in range(j, n):
            d = _e_sub(tgt[j][l], XtGX[j][l], ctx, m)
            if any(c % pk for c in d):
                raise AssertionError("node invariant violated: defect not divisible")
            cbits = _residue_bits(tuple(c // pk for c in d), ctx)
            if j == l and p == 2:
                if cbits:
                    return ("dead",)
                continue
            row = [0] * nvars
            for r in range(n):
                brj = _residue_bits(GX[r][j], ctx)
                brl = _residue_bits(GX[r][l], ctx)
                if j == l:
                    row[r * n + j] = (2 * brj) % p
                else:
                    row[r * n + j] = _res_add(row[r * n + j], brl, ctx)
                    row[r * n + l] = _res_add(row[r * n + l], brj, ctx)
            rows.append(row)
            rhs.append(cbits)

    if not rows:
        kernel = [[1 if i == j else 0 for i in range(nvars)] for j in range(nvars)]
        particular = [0] * nvars
    elif p == 2:
        kd = _kdesc(ctx)
        desc_rows = [[KappaElem(kd, b) for b in row] for row in rows]
        desc_rhs = [KappaElem(kd, b) for b in rhs]
        kern, part = kappa_linear_solve(desc_rows, desc_rhs, ncols=nvars)
        if part is None:
            return ("dead",)
        kernel = [[x.bits for x in v] for v in kern]
        particular = [x.bits for x in part]
    else:
        kernel, particular = _gauss_mod_p(rows, rhs, p, nvars)
        if particular is None:
            return ("dead",)

    rank = nvars - len(kernel)
    if p != 2 and rank == n * (n + 1) // 2:
        # Full target rank: every deeper lift is consistent with the same
        # rank, so the subtree count is a fixed power per level. Exact.
        return ("tail", ctx.q ** len(kernel))

    children = []
    for combo in _affine_space(particular, kernel, ctx):
        Y = combo
        child = tuple(
            tuple(
                tuple((X[i][j][c] + pk * Y[i * n + j][c]) % m for c in range(f))
                for j in range(n))
            for i in range(n))
        children.append(child)
    return ("children", children)


# One kappa descriptor per (degree, modulus), cached; precision is irrelevant.
_KDESC_CACHE: dict[tuple, RingDescriptor] = {}


def _kdesc(ctx: _Ctx) -> RingDescriptor:
    key = (ctx.f, ctx.modulus)
    if key not in _KDESC_CACHE:
        _KDESC_CACHE[key] = unramified(ctx.f, 10, ctx.modulus)
    return _KDESC_CACHE[key]


def _affine_space(particular, kernel, ctx):
    """Yield every vector of particular + span(kernel), as residue lifts."""
    nvars = len(particular)
    if ctx.p == 2:
        scaled = []
        table = _kappa_mul_table(ctx)
        for vec in kernel:
            for a in range(ctx.f):
                wa = 1 << a
                scaled.append([table[wa][x] for x in vec])
        for mask in range(1 << len(scaled)):
            v = list(particular)
            mm = mask
            idx = 0
            while mm:
                if mm & 1:
                    sv = scaled[idx]
                    v = [x ^ y for x, y in zip(v, sv)]
                mm >>= 1
                idx += 1
            yield [_lift_res(x, ctx) for x in v]
    else:
        for coeffs in itertools.product(range(ctx.p), repeat=len(kernel)):
            v = list(particular)
            for c, vec in zip(coeffs, kernel):
                if c:
                    v = [(x + c * y) % ctx.p for x, y in zip(v, vec)]
            yield [_lift_res(x, ctx) for x in v]


def _count_from(G, node: LiftNode, ctx, counts, budget) -> None:
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.level >= ctx.levels:
            continue
        budget[0] += 1
        if budget[0] > _NODE_LIMIT:
            raise BudgetExceeded(f"lifting tree exceeded {_NODE_LIMIT} nodes")
        step = _lift_step(G, cur.matrix, cur.level, ctx)
        if step[0] == "dead":
            continue
        if step[0] == "tail":
            width = step[1]
            for j in range(cur.level + 1, ctx.levels + 1):
                counts[j] += width ** (j - cur.level)
            continue
        children = step[1]
        counts[cur.level + 1] += len(children)
        if cur.level + 1 < ctx.levels:
            for child in children:
                stack.append(LiftNode(cur.level + 1, child))


def _count_levels(G, ctx, jobs: int = 1, split_depth: int = 1) -> list[int]:
    roots = _root_matrices(G, ctx)
    counts = [0] * (ctx.levels + 1)
    counts[1] = len(roots)
    if ctx.levels == 1:
        return counts[1:]
    nodes = [LiftNode(1, X) for X in roots]

    # Deepen the frontier to the requested split depth before going parallel.
    depth = max(1, min(split_depth, ctx.levels - 1))
    level = 1
    while level < depth:
        frontier = []
        for node in nodes:
            step = _lift_step(G, node.matrix, node.level, ctx)
            if step[0] == "dead":
                continue
            if step[0] == "tail":
                width = step[1]
                for j in range(node.level + 1, ctx.levels + 1):
                    counts[j] += width ** (j - node.level)
                continue
            counts[node.level + 1] += len(step[1])
            frontier.extend(LiftNode(node.level + 1, c) for c in step[1])
        nodes = frontier
        level += 1

    if jobs > 1 and len(nodes) > 1:
        import multiprocessing as mp

        payloads = [(G, node, ctx) for node in nodes]
        with mp.get_context("fork").Pool(jobs) as pool:
            partials = pool.map(_worker_counts, payloads)
        for part in partials:
            for j, c in enumerate(part):
                counts[j] += c
    else:
        budget = [0]
        for node in nodes:
            _count_from(G, node, ctx, counts, budget)
    return counts[1:]


def _worker_counts(payload):
    G, node, ctx = payload
    counts = [0] * (ctx.levels + 1)
    _count_from(G, node, ctx, counts, [0])
    return counts


def _guard(ctx) -> None:
    if ctx.p == 2:
        if ctx.n * ctx.f > 4 or ctx.levels > 8:
            raise BudgetExceeded(
                f"p=2 budget is rank*degree <= 4 and level <= 8 "
                f"(got {ctx.n}*{ctx.f}, {ctx.levels})")
    else:
        if ctx.n > 4 or ctx.levels > 12:
            raise BudgetExceeded(
                f"odd-p budget is rank <= 4 and level <= 12 "
                f"(got {ctx.n}, {ctx.levels})")


def count_solutions(gram, p: int = 2, levels: int = 6,
                    ring: RingDescriptor | None = None,
                    jobs: int = 1, split_depth: int = 1) -> int:
    """#{X over (ring mod p^levels) : X^T G X = G}, by exact Hensel lifting."""
    ctx, G = _normalize_gram(gram, p, levels, ring)
    _guard(ctx)
    return _count_levels(G, ctx, jobs=jobs, split_depth=split_depth)[-1]


@dataclass
class StabilizationReport:
    """Counts and normalized ratios c(k) = count_k / q^(k n(n-1)/2)."""

    prime: int
    rank: int
    residue_degree: int
    scale_span: int
    levels: list[int]
    ratios: list[Fraction]
    threshold: int
    stabilized: bool
    value: Fraction | None

    def require_value(self) -> Fraction:
        if not self.stabilized or self.value is None:
            raise NotStabilized(
                f"no plateau by level {len(self.levels)} "
                f"(threshold {self.threshold}); raise max_level")
        return self.value

    def to_json_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "ratios": [f"{r.numerator}/{r.denominator}" for r in self.ratios],
            "stabilized": self.stabilized,
            "value": (f"{self.value.numerator}/{self.value.denominator}"
                      if self.value is not None else None),
        }


def density_estimate(gram, p: int = 2, max_level: int = 6,
                     ring: RingDescriptor | None = None,
                     jobs: int = 1, split_depth: int = 1) -> StabilizationReport:
    """Count-based density ratios; the plateau value equals 2 * local density.

    The factor 2 (counting measures the full orthogonal volume) is calibrated
    on the rank-1 case: x^2 = 1 mod 2^N has 4 solutions while the density
    engine yields 2.
    """
    ctx, G = _normalize_gram(gram, p, max_level, ring)
    _guard(ctx)
    span = _scale_span(gram, ctx)
    counts = _count_levels(G, ctx, jobs=jobs, split_depth=split_depth)
    q = ctx.q
    halfdim = ctx.n * (ctx.n - 1) // 2
    ratios = [Fraction(counts[k - 1], q ** (k * halfdim)) for k in range(1, max_level + 1)]
    threshold = max(2 * span + 2, 3)
    stabilized = False
    value = None
    for k in range(threshold, max_level - 1):
        if ratios[k - 1] == ratios[k] == ratios[k + 1]:
            stabilized = True
            value = ratios[k - 1]
            break
    return StabilizationReport(
        prime=p, rank=ctx.n, residue_degree=ctx.f, scale_span=span,
        levels=counts, ratios=ratios, threshold=threshold,
        stabilized=stabilized, value=value)


def naive_count(gram, p: int = 2, levels: int = 4) -> int:
    """Vectorized full enumeration; reference for the lifting tree (f = 1)."""
    import numpy as np

    ctx, G = _normalize_gram(gram, p, levels, None)
    if ctx.f != 1:
        raise ValueError("naive enumeration supports residue degree 1 only")
    n = ctx.n
    M = p ** levels
    g = [[G[i][j][0] for j in range(n)] for i in range(n)]
    if n == 1:
        x = np.arange(M, dtype=np.int64)
        return int(np.count_nonzero((g[0][0] * x * x - g[0][0]) % M == 0))
    if n == 2:
        if M ** 4 > 1 << 22:
            raise BudgetExceeded("naive enumeration limited to p^(4 levels) <= 2^22")
        t = np.arange(M ** 4, dtype=np.int64)
        a = t % M
        b = (t // M) % M
        c = (t // (M * M)) % M
        d = (t // (M * M * M)) % M
        g11, g12, g22 = g[0][0], g[0][1], g[1][1]
        e1 = (g11 * a * a + 2 * g12 * a * c + g22 * c * c - g11) % M
        e2 = (g11 * b * b + 2 * g12 * b * d + g22 * d * d - g22) % M
        e3 = (g11 * a * b + g12 * (a * d + b * c) + g22 * c * d - g12) % M
        return int(np.count_nonzero((e1 == 0) & (e2 == 0) & (e3 == 0)))
    raise BudgetExceeded("naive enumeration supports rank <= 2")


def brute_isometry(u1, u2, bits: int = 3,
                   ring: RingDescriptor | None = None):
    """Exhaustive search for unimodular T with T^T U1 T = U2 mod 2^bits.

    Returns the witness as a matrix of coefficient tuples, or None: the
    search is exhaustive, so None certifies non-existence at that precision.
    """
    if bits < 1 or bits > 6:
        raise BudgetExceeded("isometry search supports 1 <= bits <= 6")
    ctxa, U1 = _normalize_gram(u1, 2, bits, ring)
    ctxb, U2 = _normalize_gram(u2, 2, bits, ring)
    if ctxa.n != ctxb.n or ctxa.f != ctxb.f:
        raise ValueError("blocks live over different rings or ranks")
    ctx = ctxa
    if ctx.n > 3:
        raise BudgetExceeded("isometry search supports rank <= 3")
    n, q = ctx.n, ctx.q
    table = _kappa_mul_table(ctx)

    def res_mat(U):
        return [[_residue_bits(U[i][j], ctx) for j in range(n)] for i in range(n)]

    def invertible(X):
        rows = [list(r) for r in X]
        rank = 0
        for col in range(n):
            sel = next((r for r in range(rank, n) if rows[r][col]), None)
            if sel is None:
                return False
            rows[rank], rows[sel] = rows[sel], rows[rank]
            inv = _kappa_inv_bits(rows[rank][col], ctx, table)
            rows[rank] = [table[inv][x] for x in rows[rank]]
            for r in range(n):
                if r != rank and rows[r][col]:
                    cc = rows[r][col]
                    rows[r] = [x ^ table[cc][y] for x, y in zip(rows[r], rows[rank])]
            rank += 1
        return True

    R1, R2 = res_mat(U1), res_mat(U2)
    roots = []
    for flat in itertools.product(range(q), repeat=n * n):
        X = [flat[i * n:(i + 1) * n] for i in range(n)]
        if not invertible(X):
            continue
        ok = True
        for j in range(n):
            for l in range(j, n):
                acc = 0
                for r in range(n):
                    for s in range(n):
                        acc ^= table[X[r][j]][table[R1[r][s]][X[s][l]]]
                if acc != R2[j][l]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            roots.append(tuple(tuple(_lift_res(x, ctx) for x in row) for row in X))

    stack = [LiftNode(1, X) for X in roots]
    while stack:
        node = stack.pop()
        if node.level == bits:
            return node.matrix
        step = _lift_step(U1, node.matrix, node.level, ctx, target=U2)
        if step[0] == "dead":
            continue
        for child in step[1]:
            stack.append(LiftNode(node.level + 1, child))
    return None


def _kappa_inv_bits(bits: int, ctx, table) -> int:
    acc = 1
    e = ctx.q - 2
    base = bits
    while e:
        if e & 1:
            acc = table[acc][base]
        base = table[base][base]
        e >>= 1
    return acc
