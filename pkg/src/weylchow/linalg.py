"""Exact linear algebra over F_p, Q, and Z.

Everything here works on plain Python lists of ints/Fractions; no floating
point anywhere.  Integer routines produce saturated kernels and
Hermite-reduced lattice bases so that torsion questions (membership up to a
p-power, elementary-divisor valuations) have exact answers.

Conventions: a "matrix" is a list of rows; a "basis" is a list of column
vectors spanning a subspace or lattice of the ambient coordinate space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

from .poly import Domain

Vector = List[int]


class LinalgError(Exception):
    pass


# ---------------------------------------------------------------------------
# Small helpers
# ---------------------------------------------------------------------------


def zeros(n: int) -> Vector:
    return [0] * n


def is_zero_vec(v: Sequence) -> bool:
    return all(x == 0 for x in v)


def mat_vec(m: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    return [sum(row[j] * v[j] for j in range(len(v))) for row in m]


def identity(n: int) -> List[Vector]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence]) -> List[List]:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


# ---------------------------------------------------------------------------
# F_p elimination
# ---------------------------------------------------------------------------


def rref_fp(rows: List[List[int]], p: int) -> Tuple[List[List[int]], List[int]]:
    """Reduced row echelon form mod p; returns (rref rows, pivot columns)."""
    if p == 2:
        return _rref_f2(rows)
    m = [[x % p for x in row] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if m[i][c] % p:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                row_r = m[r]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], row_r)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r] + [[0] * ncols for _ in range(nrows - r)], pivots


def _rref_f2(rows: List[List[int]]) -> Tuple[List[List[int]], List[int]]:
    """F_2 elimination on rows packed as Python ints (bit j = column j)."""
    ncols = len(rows[0]) if rows else 0
    packed = []
    for row in rows:
        acc = 0
        for j, x in enumerate(row):
            if x & 1:
                acc |= 1 << j
        packed.append(acc)
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        bit = 1 << c
        pivot = None
        for i in range(r, len(packed)):
            if packed[i] & bit:
                pivot = i
                break
        if pivot is None:
            continue
        packed[r], packed[pivot] = packed[pivot], packed[r]
        for i in range(len(packed)):
            if i != r and packed[i] & bit:
                packed[i] ^= packed[r]
        pivots.append(c)
        r += 1
        if r == len(packed):
            break
    out = []
    for acc in packed:
        out.append([(acc >> j) & 1 for j in range(ncols)])
    return out, pivots


def rank_fp(rows: List[List[int]], p: int) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rref_fp(rows, p)[1])


def kernel_fp(rows: List[List[int]], ncols: int, p: int) -> List[Vector]:
    """Basis of the right null space mod p (columns as vectors of length ncols)."""
    if ncols == 0:
        return []
    if not rows:
        return identity(ncols)
    red, pivots = rref_fp(rows, p)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fcol in free:
        v = zeros(ncols)
        v[fcol] = 1
        for r, pcol in enumerate(pivots):
            v[pcol] = (-red[r][fcol]) % p
        basis.append(v)
    return basis


def solve_fp(cols: List[Vector], target: Vector, p: int) -> Optional[Vector]:
    """Solve sum_j x_j cols[j] = target mod p; None if inconsistent."""
    n = len(target)
    k = len(cols)
    if k == 0:
        return [] if all(t % p == 0 for t in target) else None
    rows = [[cols[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    red, pivots = rref_fp(rows, p)
    x = zeros(k)
    for r, c in enumerate(pivots):
        if c == k:
            return None
        x[c] = red[r][k]
    # Pivots give one solution since non-pivot free vars are set to 0.
    check = [sum(cols[j][i] * x[j] for j in range(k)) % p for i in range(n)]
    if check != [t % p for t in target]:
        return None
    return x


# ---------------------------------------------------------------------------
# Rational elimination
# ---------------------------------------------------------------------------


def rref_q(rows: List[List[Fraction]]) -> Tuple[List[List[Fraction]], List[int]]:
    m = [[Fraction(x) for x in row] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank_q(rows: List[List]) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rref_q(rows)[1])


def kernel_q(rows: List[List], ncols: int) -> List[List[Fraction]]:
    if ncols == 0:
        return []
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref_q(rows)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for r, pcol in enumerate(pivots):
            v[pcol] = -red[r][fcol]
        basis.append(v)
    return basis


def solve_q(cols: List[Sequence], target: Sequence) -> Optional[List[Fraction]]:
    """Solve the rational system sum_j x_j cols[j] = target; None if none."""
    n = len(target)
    k = len(cols)
    if k == 0:
        return [] if all(t == 0 for t in target) else None
    rows = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(n)]
    red, pivots = rref_q(rows)
    x = [Fraction(0)] * k
    for r, c in enumerate(pivots):
        if c == k:
            return None
        x[c] = red[r][k]
    for i in range(n):
        if sum(Fraction(cols[j][i]) * x[j] for j in range(k)) != Fraction(target[i]):
            return None
    return x


# ---------------------------------------------------------------------------
# Integer lattices
# ---------------------------------------------------------------------------


def kernel_z(rows: List[List[int]], ncols: int) -> List[Vector]:
    """Basis of the saturated integer kernel {x in Z^ncols : M x = 0}.

    Column reduction with a tracked unimodular transform: M U = E; kernel
    basis = columns of U below the zero columns of E.
    """
    if ncols == 0:
        return []
    work = [list(row) for row in rows]
    u = identity(ncols)  # columns of U tracked as vectors

    def col(j):
        return [work[i][j] for i in range(len(work))]

    def addmul_col(dst, src, q):
        for i in range(len(work)):
            work[i][dst] += q * work[i][src]
        for i in range(ncols):
            u[i][dst] += q * u[i][src]

    def swap_col(a, b):
        for i in range(len(work)):
            work[i][a], work[i][b] = work[i][b], work[i][a]
        for i in range(ncols):
            u[i][a], u[i][b] = u[i][b], u[i][a]

    r = 0  # next column to place a pivot in
    for i in range(len(work)):
        # Find a nonzero entry in row i among columns >= r; reduce by gcd.
        while True:
            nz = [j for j in range(r, ncols) if work[i][j] != 0]
            if not nz:
                break
            if len(nz) == 1:
                if nz[0] != r:
                    swap_col(r, nz[0])
                break
            # Reduce all others by the column with the smallest |entry|.
            jmin = min(nz, key=lambda j: abs(work[i][j]))
            for j in nz:
                if j != jmin:
                    q = work[i][j] // work[i][jmin]
                    if q:
                        addmul_col(j, jmin, -q)
        if r < ncols and work[i][r] != 0:
            r += 1
        if r == ncols:
            break
    kernel = []
    for j in range(r, ncols):
        if all(work[i][j] == 0 for i in range(len(work))):
            kernel.append([u[i][j] for i in range(ncols)])
    return hnf_basis(kernel)


def hnf_basis(cols: List[Vector]) -> List[Vector]:
    """Hermite-reduced basis of the lattice spanned by the given columns.

    Output columns are in column echelon form with positive pivots and
    off-pivot entries reduced; linearly dependent inputs are pruned.
    """
    if not cols:
        return []
    n = len(cols[0])
    work = [list(c) for c in cols]
    basis: List[Vector] = []
    row = 0
    while work and row < n:
        nz = [c for c in work if c[row] != 0]
        if not nz:
            row += 1
            continue
        # Euclidean reduction on entries in this row.
        while True:
            nz = [c for c in work if c[row] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda c: abs(c[row]))
            pivot = nz[0]
            for c in nz[1:]:
                q = c[row] // pivot[row]
                if q:
                    for i in range(n):
                        c[i] -= q * pivot[i]
        nz = [c for c in work if c[row] != 0]
        if nz:
            pivot = nz[0]
            if pivot[row] < 0:
                for i in range(n):
                    pivot[i] = -pivot[i]
            basis.append(pivot)
            work = [c for c in work if c is not pivot and not is_zero_vec(c)]
        row += 1
    # Reduce earlier basis vectors by later pivots for a canonical form.
    for idx in range(len(basis) - 1, -1, -1):
        prow = next(i for i in range(n) if basis[idx][i] != 0)
        for jdx in range(idx):
            q = basis[jdx][prow] // basis[idx][prow]
            if q:
                for i in range(n):
                    basis[jdx][i] -= q * basis[idx][i]
    return basis


def lattice_solve(cols: List[Vector], target: Vector) -> Optional[List[Fraction]]:
    """Rational coordinates of target in the given columns, if any."""
    return solve_q(cols, target)


def lattice_contains(cols: List[Vector], target: Vector) -> bool:
    x = solve_q(cols, target)
    return x is not None and all(c.denominator == 1 for c in x)


def lattice_sum(a: List[Vector], b: List[Vector]) -> List[Vector]:
    return hnf_basis([list(v) for v in a] + [list(v) for v in b])


def lattice_eq(a: List[Vector], b: List[Vector]) -> bool:
    return hnf_basis([list(v) for v in a]) == hnf_basis([list(v) for v in b])


def preimage_kernel(mat_cols: List[Vector], target_lattice: List[Vector]) -> List[Vector]:
    """{c in Z^k : sum_j c_j mat_cols[j] lies in the target lattice}.

    mat_cols are the images of the k source generators; the result is a
    Hermite basis of the solution lattice in source coordinates.
    """
    k = len(mat_cols)
    if k == 0:
        return []
    n = len(mat_cols[0])
    t = len(target_lattice)
    if all(is_zero_vec(c) for c in mat_cols):
        return identity(k)
    rows = []
    for i in range(n):
        rows.append([mat_cols[j][i] for j in range(k)] + [-target_lattice[j][i] for j in range(t)])
    ker = kernel_z(rows, k + t)
    return hnf_basis([v[:k] for v in ker])


# ---------------------------------------------------------------------------
# Smith normal form (divisors only)
# ---------------------------------------------------------------------------


def smith_divisors(rows: List[List[int]]) -> List[int]:
    """Nonzero elementary divisors of an integer matrix, in divisibility order."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    divisors: List[int] = []
    top = 0
    while True:
        # Find a nonzero entry at or below/right of (top, top).
        pivot = None
        for i in range(top, nrows):
            for j in range(top, ncols):
                if m[i][j] != 0:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        while True:
            # Move the smallest-magnitude nonzero entry to (top, top).
            best = None
            for i in range(top, nrows):
                for j in range(top, ncols):
                    if m[i][j] != 0 and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                        best = (i, j)
            bi, bj = best
            m[top], m[bi] = m[bi], m[top]
            for row in m:
                row[top], row[bj] = row[bj], row[top]
            p = m[top][top]
            done = True
            for i in range(top + 1, nrows):
                q = m[i][top] // p
                if q:
                    m[i] = [x - q * y for x, y in zip(m[i], m[top])]
                if m[i][top] != 0:
                    done = False
            for j in range(top + 1, ncols):
                q = m[top][j] // p
                if q:
                    for i in range(nrows):
                        m[i][j] -= q * m[i][top]
                if m[top][j] != 0:
                    done = False
            if done:
                break
        divisors.append(abs(m[top][top]))
        top += 1
        if top >= nrows or top >= ncols:
            break
    # Enforce the divisibility chain d1 | d2 | ...
    changed = True
    while changed:
        changed = False
        for i in range(len(divisors) - 1):
            a, b = divisors[i], divisors[i + 1]
            if b % a != 0:
                g = gcd(a, b)
                divisors[i], divisors[i + 1] = g, a * b // g
                changed = True
    return divisors


def snf_with_basis(rows: List[List[int]]) -> Tuple[List[int], List[Vector]]:
    """Smith data of the column span: divisors d_i and an ambient basis u_i
    with col(M) = span{d_1 u_1, .., d_r u_r}.

    Row operations on M are mirrored as inverse column operations on a
    tracked matrix, whose columns give the u_i.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    u = identity(nrows)  # columns of R^{-1}

    def row_addmul(i, j, q):  # row_i -= q * row_j  =>  u col_j += q * col_i
        m[i] = [x - q * y for x, y in zip(m[i], m[j])]
        for k in range(nrows):
            u[k][j] += q * u[k][i]

    def row_swap(i, j):
        m[i], m[j] = m[j], m[i]
        for k in range(nrows):
            u[k][i], u[k][j] = u[k][j], u[k][i]

    def row_negate(i):
        m[i] = [-x for x in m[i]]
        for k in range(nrows):
            u[k][i] = -u[k][i]

    divisors: List[int] = []
    top = 0
    while top < nrows and top < ncols:
        pivot = None
        for i in range(top, nrows):
            for j in range(top, ncols):
                if m[i][j] != 0:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        while True:
            best = None
            for i in range(top, nrows):
                for j in range(top, ncols):
                    if m[i][j] != 0 and (
                        best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])
                    ):
                        best = (i, j)
            bi, bj = best
            if bi != top:
                row_swap(top, bi)
            if bj != top:
                for row in m:
                    row[top], row[bj] = row[bj], row[top]
            if m[top][top] < 0:
                row_negate(top)
            piv = m[top][top]
            done = True
            for i in range(top + 1, nrows):
                q = m[i][top] // piv
                if q:
                    row_addmul(i, top, q)
                if m[i][top] != 0:
                    done = False
            for j in range(top + 1, ncols):
                q = m[top][j] // piv
                if q:
                    for i in range(nrows):
                        m[i][j] -= q * m[i][top]
                if m[top][j] != 0:
                    done = False
            if done:
                break
        divisors.append(m[top][top])
        top += 1
    u_cols = [[u[i][j] for i in range(nrows)] for j in range(nrows)]
    return divisors, u_cols


def p_valuation(n: int, p: int) -> int:
    if n == 0:
        raise LinalgError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# Public wrappers
# ---------------------------------------------------------------------------


@dataclass
class ExactMatrix:
    """Dense exact matrix with a domain tag."""

    domain: Domain
    rows: List[List]

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0


@dataclass
class SubmoduleBasis:
    """Spanning vectors for a submodule of a based ambient slice.

    Over F_p and Q the vectors are linearly independent; over Z they form a
    Hermite-reduced lattice basis (saturated when produced by kernel()).
    """

    domain: Domain
    ambient: List  # basis labels for the ambient coordinates (e.g. monomials)
    vectors: List[Vector] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.vectors)


def kernel(m: ExactMatrix, ambient: Optional[List] = None) -> SubmoduleBasis:
    """Right null space of m, saturated over Z."""
    amb = ambient if ambient is not None else list(range(m.ncols))
    if m.domain.kind == "fp":
        vecs = kernel_fp(m.rows, m.ncols, m.domain.p)
    elif m.domain.kind == "rat":
        vecs = kernel_q(m.rows, m.ncols)
    else:
        vecs = kernel_z(_integerize_rows(m.rows), m.ncols)
    return SubmoduleBasis(m.domain, amb, vecs)


def _integerize_rows(rows: List[List]) -> List[List[int]]:
    """Clear denominators row by row (row scaling preserves the kernel)."""
    out = []
    for row in rows:
        lcm = 1
        for x in row:
            if isinstance(x, Fraction):
                lcm = lcm * x.denominator // gcd(lcm, x.denominator)
        out.append([int(x * lcm) if isinstance(x, Fraction) else int(x) * lcm for x in row])
    return out


@dataclass
class Membership:
    inside: bool
    scale_power: Optional[int]  # minimal k with p^k v in the span; None if no k works

    @property
    def verdict(self) -> str:
        if self.inside:
            return "inside"
        if self.scale_power is None:
            return "outside"
        return "inside-after-scaling p^%d" % self.scale_power


def membership(v: Vector, s: SubmoduleBasis) -> Membership:
    """Exact membership of v in the span, with the minimal p-power if p-local."""
    if s.vectors and len(v) != len(s.vectors[0]):
        raise LinalgError("dimension mismatch")
    if is_zero_vec(v):
        return Membership(True, 0)
    x = solve_q(s.vectors, v)
    if x is None:
        return Membership(False, None)
    if s.domain.kind in ("rat", "fp"):
        return Membership(True, 0)
    p = s.domain.p if s.domain.kind == "plocal" else None
    k = 0
    for c in x:
        den = c.denominator
        if den == 1:
            continue
        if p is None:
            return Membership(False, None)
        other = den
        v_p = 0
        while other % p == 0:
            other //= p
            v_p += 1
        if other != 1:
            return Membership(False, None)
        k = max(k, v_p)
    if k == 0:
        return Membership(True, 0)
    return Membership(False, k)


@dataclass
class RankProfile:
    rank_q: int
    rank_fp: int
    p: int
    valuations: List[int]


def rank_per_domain(m: ExactMatrix, p: int) -> RankProfile:
    """Rational rank, mod-p rank, and p-valuations of the elementary divisors."""
    rows = _integerize_rows(m.rows)
    divisors = smith_divisors(rows)
    rq = len(divisors)
    vals = [p_valuation(d, p) for d in divisors]
    rp = sum(1 for v in vals if v == 0)
    return RankProfile(rq, rp, p, vals)
