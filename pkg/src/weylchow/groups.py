"""Finite matrix groups acting on the generator lattice of a graded algebra.

A GroupAction holds generating matrices acting on the column vector of
algebra generators (all of one degree, 1 or 2).  Builders cover the groups
used by the audits: signed permutation groups S_k^± on the SO(2k+1) torus
lattice, the same abstract group on the Spin(2k+1) weight lattice, GL_h(F_2)
on degree-1 generators, and the Weyl group of F_4 on its 4-dimensional
weight lattice.

Matrix entries are exact ints or Fractions.  The F_4 reflections need the
half-sum vector, so their matrices are half-integral in the e-basis; they
act integrally on any domain where 2 is a unit (Q, F_3, Z_(3)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import rank_q, solve_q
from .poly import AlgebraSignature, Domain, Generator, Polynomial

MatrixRows = Tuple[Tuple[Fraction, ...], ...]


class GroupError(Exception):
    pass


def _freeze(matrix: Sequence[Sequence]) -> MatrixRows:
    return tuple(tuple(Fraction(x) for x in row) for row in matrix)


def mat_mul(a: MatrixRows, b: MatrixRows) -> MatrixRows:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def mat_identity(n: int) -> MatrixRows:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


@dataclass
class GroupAction:
    """Generating matrices for a finite group acting on graded generators.

    gen_names/gen_degree describe the generators being acted on (all of the
    same degree).  Each matrix column j gives the image of generator j as a
    linear combination of the generators.  When mod is set, matrices live
    over F_mod and compose mod that prime (used for GL_h(F_2)).
    """

    name: str
    gen_names: Tuple[str, ...]
    gen_degree: int
    matrices: Tuple[MatrixRows, ...]
    mod: Optional[int] = None
    element_bound: int = 10**6
    _elements: Optional[Tuple[MatrixRows, ...]] = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.gen_names)
        mats = tuple(self.reduce(_freeze(m)) for m in self.matrices)
        for m in mats:
            if len(m) != n or any(len(row) != n for row in m):
                raise GroupError("matrix size does not match generator count")
            if self.mod is not None:
                from .linalg import rank_fp

                if rank_fp([[int(x) for x in row] for row in m], self.mod) != n:
                    raise GroupError("generating matrix is singular mod %d" % self.mod)
            elif rank_q([list(row) for row in m]) != n:
                raise GroupError("generating matrix is singular")
        self.matrices = mats

    def reduce(self, m: MatrixRows) -> MatrixRows:
        if self.mod is None:
            return m
        return tuple(tuple(Fraction(int(x) % self.mod) for x in row) for row in m)

    def compose(self, a: MatrixRows, b: MatrixRows) -> MatrixRows:
        return self.reduce(mat_mul(a, b))

    def signature(self, domain: Domain) -> AlgebraSignature:
        if self.mod is not None and domain.characteristic != self.mod:
            raise GroupError(
                "action %s is defined mod %d; domain %s unsupported" % (self.name, self.mod, domain)
            )
        return AlgebraSignature(
            [Generator(nm, self.gen_degree) for nm in self.gen_names], domain
        )

    def substitution(self, matrix: MatrixRows, domain: Domain) -> Dict[str, Polynomial]:
        """Images of the generators under one matrix, as polynomials."""
        sig = self.signature(domain)
        images: Dict[str, Polynomial] = {}
        for j, nm in enumerate(self.gen_names):
            poly = Polynomial.zero(sig)
            for i in range(len(self.gen_names)):
                c = matrix[i][j]
                if c != 0:
                    poly = poly + Polynomial.gen(sig, self.gen_names[i]).scale(c)
            images[nm] = poly
        return images

    def elements(self, bound: Optional[int] = None) -> Tuple[MatrixRows, ...]:
        if self._elements is None:
            self._elements = tuple(enumerate_group(self, bound or self.element_bound))
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements())


def enumerate_group(action: GroupAction, bound: int) -> List[MatrixRows]:
    """Closure of the generating matrices under multiplication.

    Raises if the closure exceeds the bound (guards against non-finite or
    wrongly entered generator sets).
    """
    if bound < 1:
        raise GroupError("bound must be >= 1")
    n = len(action.gen_names)
    ident = mat_identity(n)
    seen = {ident}
    frontier = [ident]
    while frontier:
        new_frontier = []
        for m in frontier:
            for g in action.matrices:
                prod = action.compose(m, g)
                if prod not in seen:
                    seen.add(prod)
                    new_frontier.append(prod)
                    if len(seen) > bound:
                        raise GroupError("group closure exceeds bound %d" % bound)
        frontier = new_frontier
    return sorted(seen)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def _perm_matrix(n: int, perm: Dict[int, int]) -> List[List[int]]:
    """Matrix sending generator j to generator perm[j] (identity elsewhere)."""
    m = [[0] * n for _ in range(n)]
    for j in range(n):
        m[perm.get(j, j)][j] = 1
    return m


def _sign_matrix(n: int, idx: int) -> List[List[int]]:
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    m[idx][idx] = -1
    return m


def build_weyl_so(k: int) -> GroupAction:
    """S_k^± on Z[t_1..t_k], |t_i| = 2: permutations and sign changes."""
    if k < 1:
        raise GroupError("rank must be >= 1")
    names = tuple("t%d" % (i + 1) for i in range(k))
    mats: List[List[List[int]]] = []
    if k >= 2:
        mats.append(_perm_matrix(k, {0: 1, 1: 0}))
        if k > 2:
            cycle = {i: (i + 1) % k for i in range(k)}
            mats.append(_perm_matrix(k, cycle))
    mats.append(_sign_matrix(k, 0))
    return GroupAction("so(%d)" % (2 * k + 1), names, 2, tuple(_freeze(m) for m in mats))


def spin_base_change(k: int) -> List[List[Fraction]]:
    """Columns of (t_1, .., t_{k-1}, gamma) written in the t-basis; 2*gamma = sum t_i."""
    cols = []
    for i in range(k - 1):
        col = [Fraction(0)] * k
        col[i] = Fraction(1)
        cols.append(col)
    cols.append([Fraction(1, 2)] * k)
    return [[cols[j][i] for j in range(k)] for i in range(k)]


def build_weyl_spin(k: int) -> GroupAction:
    """S_k^± on the Spin(2k+1) weight lattice with basis (t_1..t_{k-1}, gamma).

    The matrices are the SO ones conjugated by the base change; each must be
    integral in the new basis (a non-integral entry signals a wrong lattice).
    """
    if k < 2:
        raise GroupError("rank must be >= 2 for the spin lattice")
    so = build_weyl_so(k)
    p_mat = _freeze(spin_base_change(k))
    p_inv = _invert(p_mat)
    names = tuple(["t%d" % (i + 1) for i in range(k - 1)] + ["gamma"])
    new_mats = []
    for m in so.matrices:
        conj = mat_mul(p_inv, mat_mul(m, p_mat))
        for row in conj:
            for x in row:
                if x.denominator != 1:
                    raise GroupError("non-integral matrix after base change: %s" % (conj,))
        new_mats.append(conj)
    return GroupAction("spin(%d)" % (2 * k + 1), names, 2, tuple(new_mats))


def _invert(m: MatrixRows) -> MatrixRows:
    n = len(m)
    cols = []
    for j in range(n):
        target = [Fraction(int(i == j)) for i in range(n)]
        x = solve_q([[m[i][jj] for i in range(n)] for jj in range(n)], target)
        if x is None:
            raise GroupError("matrix not invertible")
        cols.append(x)
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def build_gl(h: int, p: int = 2) -> GroupAction:
    """GL_h(F_2) acting on degree-1 generators x_1..x_h."""
    if p != 2:
        raise GroupError("only p = 2 is supported")
    if h < 1 or h > 4:
        raise GroupError("h must be in 1..4 (|GL_4(F_2)| = 20160 is the guard)")
    names = tuple("x%d" % (i + 1) for i in range(h))
    if h == 1:
        return GroupAction("gl(1)", names, 1, (mat_identity(1),), mod=2)
    mats = []
    mats.append(_perm_matrix(h, {0: 1, 1: 0}))
    if h > 2:
        mats.append(_perm_matrix(h, {i: (i + 1) % h for i in range(h)}))
    # Transvection: x_1 -> x_1 + x_2 (column convention: image of gen 0).
    t = [[int(i == j) for j in range(h)] for i in range(h)]
    t[1][0] = 1
    mats.append(t)
    return GroupAction("gl(%d)" % h, names, 1, tuple(_freeze(m) for m in mats), mod=2)


# ---------------------------------------------------------------------------
# Action files
# ---------------------------------------------------------------------------


def serialize_action(action: GroupAction) -> str:
    lines = [
        "[action]",
        "name = %s" % action.name,
        "degree = %d" % action.gen_degree,
        "generators = %s" % " ".join(action.gen_names),
    ]
    if action.mod is not None:
        lines.append("mod = %d" % action.mod)
    for mat in action.matrices:
        lines.append("")
        lines.append("[gen]")
        for row in mat:
            lines.append(" ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def parse_action(text: str) -> GroupAction:
    """Parse the '[action]' header plus one '[gen]' block per matrix.

    Matrix entries are integers or fractions like 1/2, one row per line.
    """
    header: Dict[str, str] = {}
    matrices: List[List[List[Fraction]]] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            head = line[1:-1].strip().lower()
            if head == "action":
                section = "action"
            elif head == "gen":
                section = "gen"
                matrices.append([])
            else:
                raise GroupError("line %d: unknown section %r" % (lineno, head))
            continue
        if section == "action":
            if "=" not in line:
                raise GroupError("line %d: expected key = value" % lineno)
            key, val = [s.strip() for s in line.split("=", 1)]
            header[key] = val
        elif section == "gen":
            try:
                matrices[-1].append([Fraction(tok) for tok in line.split()])
            except ValueError:
                raise GroupError("line %d: malformed matrix row" % lineno) from None
        else:
            raise GroupError("line %d: content outside any section" % lineno)
    if "generators" not in header or "degree" not in header:
        raise GroupError("[action] section must declare generators and degree")
    names = tuple(header["generators"].split())
    mod = int(header["mod"]) if "mod" in header else None
    return GroupAction(
        header.get("name", "action"),
        names,
        int(header["degree"]),
        tuple(_freeze(m) for m in matrices),
        mod=mod,
    )


def load_action(path: str) -> GroupAction:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_action(fh.read())


def build_weyl_f4() -> GroupAction:
    """Weyl group of F_4 (order 1152) via the four simple-root reflections.

    Simple roots in the orthonormal e-basis: e2-e3, e3-e4, e4, (e1-e2-e3-e4)/2.
    The last reflection is half-integral in this basis, so the action is used
    over domains where 2 is invertible (Q, F_3, Z_(3)).
    """
    names = ("t1", "t2", "t3", "t4")
    roots = [
        [Fraction(0), Fraction(1), Fraction(-1), Fraction(0)],
        [Fraction(0), Fraction(0), Fraction(1), Fraction(-1)],
        [Fraction(0), Fraction(0), Fraction(0), Fraction(1)],
        [Fraction(1, 2), Fraction(-1, 2), Fraction(-1, 2), Fraction(-1, 2)],
    ]
    mats = []
    for alpha in roots:
        norm2 = sum(a * a for a in alpha)
        rows = []
        for i in range(4):
            row = []
            for j in range(4):
                e_j_dot = alpha[j]  # (e_j, alpha)
                val = Fraction(int(i == j)) - 2 * e_j_dot * alpha[i] / norm2
                row.append(val)
            rows.append(row)
        mats.append(rows)
    return GroupAction("weyl(f4)", names, 2, tuple(_freeze(m) for m in mats))
