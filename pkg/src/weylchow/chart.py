"""Charts: finite-window descriptions of H*(BX; Z_(p)) with Milnor actions.

A chart carries the mod-p additive basis per degree (monomials in named
classes), the Q_i actions for i = 0..m as matrices on those bases, and the
prime and window.  The integral structure is derived from Q_0: since the
torsion has exponent exactly p, the free part in each degree is a lift of
ker(Q_0)/im(Q_0) and the p-torsion part bijects with im(Q_0).

Chart files are section-based text ("#" comments):

    [chart]            name/p/window key = value lines
    [classes]          'name degree torsion_exponent' per generator; the
                       exponent is 1 when the generator reduces an integral
                       p-torsion class (it lies in im Q_0), else 0
    [basis]            optional; 'degree: mono mono ...' lines for charts
                       whose basis is not the free graded-commutative one
    [q I]              'source -> polynomial' generator images of Q_I
    [aliases]          'short = monomial' naming shortcuts

Q_i on a basis monomial is computed by the graded Leibniz rule from the
generator images, then projected to the basis (monomials outside the basis
list are relations of the presentation and project to zero).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import linalg
from .poly import (
    AlgebraSignature,
    Generator,
    Monomial,
    Polynomial,
    degree_slice,
    fp,
    parse as parse_poly,
)
from .steenrod import DerivationSpec, SteenrodError, apply_derivation


class ChartError(Exception):
    pass


def q_shift(p: int, i: int) -> int:
    return 2 * p**i - 1


@dataclass
class Chart:
    name: str
    p: int
    window: int
    sig: AlgebraSignature
    basis: Dict[int, List[Monomial]]
    q_images: Dict[int, Dict[str, Polynomial]]
    torsion_tags: Dict[str, int] = field(default_factory=dict)
    aliases: Dict[str, str] = field(default_factory=dict)
    free_basis: bool = True
    q_mats: Dict[int, Dict[int, List[List[int]]]] = field(default_factory=dict, repr=False)
    _integral: Dict[int, "IntegralSlice"] = field(default_factory=dict, repr=False)

    def __eq__(self, other):
        return (
            isinstance(other, Chart)
            and (self.p, self.window, self.sig) == (other.p, other.window, other.sig)
            and self.basis == other.basis
            and self.q_mats == other.q_mats
            and self.aliases == other.aliases
        )

    def basis_at(self, degree: int) -> List[Monomial]:
        """Basis monomials in any degree; degrees beyond the declared window
        are generated on demand into a side cache (the declared data stays
        canonical for equality and serialization)."""
        if degree < 0:
            return []
        if degree <= self.window:
            return self.basis.get(degree, [])
        ext = getattr(self, "_ext_basis", None)
        if ext is None:
            ext = {}
            self._ext_basis = ext
        if degree not in ext:
            monos = degree_slice(self.sig, degree)
            flt = getattr(self, "_basis_filter", None)
            if flt is not None:
                monos = [m for m in monos if flt(m)]
            ext[degree] = monos
        return ext[degree]

    def dim(self, degree: int) -> int:
        return len(self.basis_at(degree))

    def mono_index(self, degree: int) -> Dict[Monomial, int]:
        return {m: i for i, m in enumerate(self.basis_at(degree))}

    def q_matrix(self, i: int, degree: int) -> List[List[int]]:
        """Matrix of Q_i from degree to degree + shift (any degree; degrees
        beyond the declared window are built lazily)."""
        stored = self.q_mats.get(i, {}).get(degree)
        if stored is not None:
            return stored
        ext = getattr(self, "_ext_qmats", None)
        if ext is None:
            ext = {}
            self._ext_qmats = ext
        key = (i, degree)
        if key not in ext:
            ext[key] = _q_matrix_at(self, i, degree)
        return ext[key]

    def q_indices(self) -> List[int]:
        return sorted(self.q_mats)

    def resolve_name(self, text: str) -> Monomial:
        """A class name, alias, or monomial expression -> basis monomial."""
        name = self.aliases.get(text, text)
        try:
            poly = parse_poly(name, self.sig)
        except Exception as exc:
            raise ChartError("cannot resolve class name %r: %s" % (text, exc)) from exc
        if len(poly.terms) != 1:
            raise ChartError("%r does not name a single basis class" % text)
        ((mono, coeff),) = tuple(poly.terms.items())
        if coeff != 1:
            raise ChartError("%r carries a coefficient" % text)
        deg = self.sig.mono_degree(mono)
        if mono not in self.mono_index(deg):
            raise ChartError("%r is not a basis class of the chart" % text)
        return mono

    def mono_label(self, mono: Monomial) -> str:
        parts = []
        for e, g in zip(mono, self.sig.generators):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append("%s^%d" % (g.name, e))
        return "*".join(parts) if parts else "1"

    def integral_slice(self, degree: int) -> "IntegralSlice":
        if degree not in self._integral:
            self._integral[degree] = _build_integral_slice(self, degree)
        return self._integral[degree]


@dataclass
class IntegralSlice:
    """Integral basis of H^n(X; Z_(p)) in chart coordinates.

    free holds lifted mod-p vectors spanning a complement of im(Q_0) in
    ker(Q_0); torsion holds a lifted basis of im(Q_0).  The ambient lattice
    of the spectral-sequence blocks is Z^(len(free) + len(torsion)), with
    torsion coordinates carrying the relation p * t = 0.  q_to_torsion[i]
    is the matrix of Q_i from this integral basis to the torsion
    coordinates of the target slice.
    """

    degree: int
    free: List[List[int]]
    torsion: List[List[int]]
    q_to_torsion: Dict[int, List[List[int]]] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.free) + len(self.torsion)


# ---------------------------------------------------------------------------
# Construction and validation
# ---------------------------------------------------------------------------


def build_chart(
    name: str,
    p: int,
    window: int,
    gens: Sequence[Tuple],
    q_images: Dict[int, Dict[str, object]],
    basis_filter: Optional[Callable[[Monomial], bool]] = None,
    torsion_tags: Optional[Dict[str, int]] = None,
    aliases: Optional[Dict[str, str]] = None,
    products: Optional[Sequence[Tuple[str, str]]] = None,
) -> Chart:
    """Assemble and validate a chart.

    gens are (name, degree) or (name, degree, exterior); q_images maps each
    Milnor index to generator-image expressions (strings or Polynomials);
    basis_filter restricts the free monomial basis when the presentation
    has relations; products lists monomial rewrite rules
    ('x*y' -> 'c*z*w' or '0') used to push Leibniz terms back into the
    basis when the relations are not merely monomial vanishing.
    """
    domain = fp(p)
    gen_objs = []
    for spec in gens:
        if len(spec) == 2:
            gen_objs.append(Generator(spec[0], spec[1]))
        else:
            gen_objs.append(Generator(spec[0], spec[1], spec[2]))
    sig = AlgebraSignature(gen_objs, domain)
    basis: Dict[int, List[Monomial]] = {}
    for d in range(window + 1):
        monos = degree_slice(sig, d)
        if basis_filter is not None:
            monos = [m for m in monos if basis_filter(m)]
        basis[d] = monos
    parsed: Dict[int, Dict[str, Polynomial]] = {}
    for i, images in sorted(q_images.items()):
        out: Dict[str, Polynomial] = {}
        for gname, expr in images.items():
            poly = expr if isinstance(expr, Polynomial) else parse_poly(str(expr), sig)
            out[gname] = poly
        parsed[i] = out
    chart = Chart(
        name=name,
        p=p,
        window=window,
        sig=sig,
        basis=basis,
        q_images=parsed,
        torsion_tags=dict(torsion_tags or {}),
        aliases=dict(aliases or {}),
        free_basis=basis_filter is None,
    )
    chart._basis_filter = basis_filter
    chart._product_rules = _parse_product_rules(sig, products or ())
    chart._product_texts = [tuple(pr) for pr in (products or ())]
    _build_q_matrices(chart)
    validate_chart(chart)
    return chart


def _parse_product_rules(sig: AlgebraSignature, products: Sequence[Tuple[str, str]]):
    """Rules (lhs monomial, rhs coefficient, rhs monomial or None)."""
    rules = []
    for lhs_text, rhs_text in products:
        lhs_poly = parse_poly(lhs_text, sig)
        if len(lhs_poly.terms) != 1 or set(lhs_poly.terms.values()) != {1}:
            raise ChartError("product rule LHS %r must be a plain monomial" % lhs_text)
        ((lhs, _c),) = tuple(lhs_poly.terms.items())
        rhs_poly = parse_poly(rhs_text, sig)
        if rhs_poly.is_zero():
            rules.append((lhs, 0, None))
        elif len(rhs_poly.terms) == 1:
            ((rhs, coeff),) = tuple(rhs_poly.terms.items())
            rules.append((lhs, int(coeff), rhs))
        else:
            raise ChartError("product rule RHS %r must be a monomial or 0" % rhs_text)
    return rules


def _reduce_term(chart: Chart, mono: Monomial, coeff: int):
    """Rewrite a monomial into the basis using the chart's product rules.

    Returns (coefficient, basis monomial) or None when the term vanishes;
    raises when an image term is neither in the basis nor reducible.
    """
    flt = getattr(chart, "_basis_filter", None)
    rules = getattr(chart, "_product_rules", ())
    guard = 0
    while True:
        if flt is None or flt(mono):
            return coeff % chart.p, mono
        progressed = False
        for lhs, rcoeff, rhs in rules:
            if all(m >= l for m, l in zip(mono, lhs)):
                if rcoeff == 0 or rhs is None:
                    return None
                reduced = tuple(
                    m - l + rhs[i] for i, (m, l) in enumerate(zip(mono, lhs))
                )
                for i, g in enumerate(chart.sig.generators):
                    if g.exterior and reduced[i] > 1:
                        return None
                coeff = (coeff * rcoeff) % chart.p
                mono = reduced
                progressed = True
                break
        if not progressed:
            raise ChartError(
                "image monomial %s is neither in the basis nor reducible"
                % chart.mono_label(mono)
            )
        guard += 1
        if guard > 100:
            raise ChartError("product rewriting did not terminate")


def _derivation_specs(chart: Chart) -> Dict[int, DerivationSpec]:
    cached = getattr(chart, "_derivation_cache", None)
    if cached is not None:
        return cached
    specs = {}
    zero = Polynomial.zero(chart.sig)
    for i, images in chart.q_images.items():
        full = {g.name: images.get(g.name, zero) for g in chart.sig.generators}
        try:
            specs[i] = DerivationSpec(chart.sig, q_shift(chart.p, i), full)
        except SteenrodError as exc:
            raise ChartError("chart %s: %s" % (chart.name, exc)) from exc
    chart._derivation_cache = specs
    return specs


def _q_matrix_at(chart: Chart, i: int, degree: int) -> List[List[int]]:
    spec = _derivation_specs(chart).get(i)
    src = chart.basis_at(degree)
    tgt_index = chart.mono_index(degree + q_shift(chart.p, i))
    has_rules = bool(getattr(chart, "_product_rules", ()))
    cols = []
    for mono in src:
        col = [0] * len(tgt_index)
        if spec is not None:
            image = apply_derivation(spec, Polynomial.from_mono(chart.sig, mono))
            for m, c in image.terms.items():
                if m in tgt_index:
                    col[tgt_index[m]] = (col[tgt_index[m]] + int(c)) % chart.p
                elif has_rules:
                    reduced = _reduce_term(chart, m, int(c))
                    if reduced is not None:
                        rc, rm = reduced
                        col[tgt_index[rm]] = (col[tgt_index[rm]] + rc) % chart.p
                # without rules, monomials outside the basis are relations
        cols.append(col)
    return [[cols[j][r] for j in range(len(src))] for r in range(len(tgt_index))]


def _build_q_matrices(chart: Chart):
    specs = _derivation_specs(chart)
    for i in sorted(specs):
        shift = q_shift(chart.p, i)
        per_degree: Dict[int, List[List[int]]] = {}
        for d in range(chart.window - shift + 1):
            if chart.basis.get(d):
                per_degree[d] = _q_matrix_at(chart, i, d)
        chart.q_mats[i] = per_degree


def validate_chart(chart: Chart):
    """Degree shifts, Q_i^2 = 0 in the window, torsion-tag consistency."""
    p = chart.p
    for i, images in chart.q_images.items():
        shift = q_shift(p, i)
        for gname, img in images.items():
            gdeg = chart.sig.generators[chart.sig.index(gname)].degree
            if img.is_zero():
                continue
            if not img.is_homogeneous() or img.degree() != gdeg + shift:
                raise ChartError(
                    "chart %s: Q_%d(%s) has degree %s, expected %d"
                    % (chart.name, i, gname, img.homogeneous_degrees(), gdeg + shift)
                )
    for i, per_degree in chart.q_mats.items():
        shift = q_shift(p, i)
        for d, mat in per_degree.items():
            nxt = per_degree.get(d + shift)
            if nxt is None:
                continue
            src_dim = chart.dim(d)
            mid_dim = chart.dim(d + shift)
            for j in range(src_dim):
                for r in range(chart.dim(d + 2 * shift)):
                    acc = sum(nxt[r][k] * mat[k][j] for k in range(mid_dim)) % p
                    if acc:
                        raise ChartError(
                            "chart %s: Q_%d does not square to zero at degree %d"
                            % (chart.name, i, d)
                        )
    for gname, tag in chart.torsion_tags.items():
        gdeg = chart.sig.generators[chart.sig.index(gname)].degree
        if gdeg > chart.window:
            continue
        vec = [0] * chart.dim(gdeg)
        idx = chart.mono_index(gdeg).get(_gen_mono(chart.sig, gname))
        if idx is None:
            raise ChartError("generator %s missing from its basis slice" % gname)
        vec[idx] = 1
        sl = chart.integral_slice(gdeg)
        in_torsion = linalg.solve_fp(sl.torsion, vec, p) is not None if sl.torsion else False
        expected = 1 if in_torsion else 0
        if tag != expected:
            raise ChartError(
                "generator %s tagged torsion_exponent %d but Q_0 structure says %d"
                % (gname, tag, expected)
            )


def _gen_mono(sig: AlgebraSignature, name: str) -> Monomial:
    mono = [0] * len(sig)
    mono[sig.index(name)] = 1
    return tuple(mono)


# ---------------------------------------------------------------------------
# Integral slices
# ---------------------------------------------------------------------------


def _column_space_basis(mat: List[List[int]], p: int) -> List[List[int]]:
    """Echelon basis of the column space of a mod-p matrix."""
    if not mat or not mat[0]:
        return []
    rows = [[mat[i][j] for i in range(len(mat))] for j in range(len(mat[0]))]
    red, pivots = linalg.rref_fp(rows, p)
    return [list(red[r]) for r in range(len(pivots))]


def _build_integral_slice(chart: Chart, degree: int) -> IntegralSlice:
    p = chart.p
    dim = chart.dim(degree)
    if dim == 0:
        return IntegralSlice(degree, [], [])
    q0_out = chart.q_matrix(0, degree)
    q0_in = chart.q_matrix(0, degree - 1) if degree >= 1 else []
    kernel_vecs = linalg.kernel_fp(q0_out, dim, p) if q0_out else linalg.identity(dim)
    image_vecs = _column_space_basis(q0_in, p) if q0_in else []
    # Extend the image basis to a basis of the kernel; the added vectors
    # lift the free classes.
    span = [list(v) for v in image_vecs]
    free = []
    for v in kernel_vecs:
        if linalg.solve_fp(span, v, p) is None:
            free.append(list(v))
            span.append(list(v))
    for v in image_vecs:
        if linalg.solve_fp(kernel_vecs, v, p) is None:
            raise ChartError("Q_0 image is not contained in ker Q_0 at degree %d" % degree)
    sl = IntegralSlice(degree, free, [list(v) for v in image_vecs])
    return sl


def integral_q_matrix(chart: Chart, i: int, degree: int) -> List[List[int]]:
    """Q_i on the integral basis, expressed over the target torsion basis.

    Rows are indexed by the target slice's ambient coordinates (free part
    rows are zero: Milnor images of integral classes are p-torsion), with
    entries lifted to [0, p).
    """
    sl = chart.integral_slice(degree)
    if i in sl.q_to_torsion:
        return sl.q_to_torsion[i]
    p = chart.p
    shift = q_shift(p, i)
    qmat = chart.q_matrix(i, degree)
    tgt = chart.integral_slice(degree + shift)
    cols = []
    for vec in sl.free + sl.torsion:
        image = [sum(qmat[r][k] * vec[k] for k in range(len(vec))) % p for r in range(len(qmat))]
        if not any(image):
            coords = [0] * len(tgt.torsion)
        else:
            coords = linalg.solve_fp(tgt.torsion, image, p)
            if coords is None:
                raise ChartError(
                    "Q_%d image at degree %d is not an integral p-torsion class" % (i, degree)
                )
        cols.append(coords)
    rows = len(tgt.free) + len(tgt.torsion)
    mat = [[0] * len(cols) for _ in range(rows)]
    for j, coords in enumerate(cols):
        for t_idx, c in enumerate(coords):
            mat[len(tgt.free) + t_idx][j] = c % p
    sl.q_to_torsion[i] = mat
    return mat


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------


def serialize_chart(chart: Chart) -> str:
    lines = ["[chart]", "name = %s" % chart.name, "p = %d" % chart.p,
             "window = %d" % chart.window, "", "[classes]"]
    for g in chart.sig.generators:
        tag = chart.torsion_tags.get(g.name)
        if tag is None:
            tag = 0
            if g.degree <= chart.window:
                sl = chart.integral_slice(g.degree)
                vec = [0] * chart.dim(g.degree)
                vec[chart.mono_index(g.degree)[_gen_mono(chart.sig, g.name)]] = 1
                if sl.torsion and linalg.solve_fp(sl.torsion, vec, chart.p) is not None:
                    tag = 1
        ext = " exterior" if g.exterior else ""
        lines.append("%s %d %d%s" % (g.name, g.degree, tag, ext))
    if not chart.free_basis:
        lines.append("")
        lines.append("[basis]")
        for d in range(chart.window + 1):
            monos = chart.basis.get(d, [])
            if monos:
                lines.append("%d: %s" % (d, " ".join(chart.mono_label(m) for m in monos)))
    product_texts = getattr(chart, "_product_texts", ())
    if product_texts:
        lines.append("")
        lines.append("[products]")
        for lhs, rhs in product_texts:
            lines.append("%s -> %s" % (lhs, rhs))
    for i in sorted(chart.q_images):
        entries = [(g, img) for g, img in chart.q_images[i].items() if not img.is_zero()]
        lines.append("")
        lines.append("[q %d]" % i)
        for gname, img in sorted(entries):
            lines.append("%s -> %s" % (gname, img))
    if chart.aliases:
        lines.append("")
        lines.append("[aliases]")
        for short, full in sorted(chart.aliases.items()):
            lines.append("%s = %s" % (short, full))
    return "\n".join(lines) + "\n"


def parse_chart(text: str) -> Chart:
    section = None
    q_index: Optional[int] = None
    header: Dict[str, str] = {}
    classes: List[Tuple[str, int, int, bool]] = []
    basis_lines: Dict[int, List[str]] = {}
    q_raw: Dict[int, Dict[str, str]] = {}
    aliases: Dict[str, str] = {}
    products: List[Tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ChartError("line %d: malformed section header" % lineno)
            head = line[1:-1].strip().lower()
            if head == "chart":
                section = "chart"
            elif head == "classes":
                section = "classes"
            elif head == "basis":
                section = "basis"
            elif head == "aliases":
                section = "aliases"
            elif head == "products":
                section = "products"
            elif head.startswith("q"):
                section = "q"
                try:
                    q_index = int(head[1:].strip())
                except ValueError:
                    raise ChartError("line %d: malformed [q i] header" % lineno) from None
                q_raw.setdefault(q_index, {})
            else:
                raise ChartError("line %d: unknown section %r" % (lineno, head))
            continue
        if section == "chart":
            if "=" not in line:
                raise ChartError("line %d: expected key = value" % lineno)
            key, val = [s.strip() for s in line.split("=", 1)]
            header[key] = val
        elif section == "classes":
            parts = line.split()
            if len(parts) not in (3, 4):
                raise ChartError("line %d: expected 'name degree torsion_exponent'" % lineno)
            ext = len(parts) == 4 and parts[3] == "exterior"
            try:
                classes.append((parts[0], int(parts[1]), int(parts[2]), ext))
            except ValueError:
                raise ChartError("line %d: malformed class line" % lineno) from None
        elif section == "basis":
            if ":" not in line:
                raise ChartError("line %d: expected 'degree: monomials'" % lineno)
            dtxt, monos = line.split(":", 1)
            basis_lines[int(dtxt.strip())] = monos.split()
        elif section == "q":
            if "->" not in line:
                raise ChartError("line %d: expected 'source -> polynomial'" % lineno)
            src, img = [s.strip() for s in line.split("->", 1)]
            q_raw[q_index][src] = img
        elif section == "products":
            if "->" not in line:
                raise ChartError("line %d: expected 'monomial -> term'" % lineno)
            lhs, rhs = [s.strip() for s in line.split("->", 1)]
            products.append((lhs, rhs))
        elif section == "aliases":
            if "=" not in line:
                raise ChartError("line %d: expected 'short = monomial'" % lineno)
            short, full = [s.strip() for s in line.split("=", 1)]
            aliases[short] = full
        else:
            raise ChartError("line %d: content outside any section" % lineno)
    for key in ("p", "window"):
        if key not in header:
            raise ChartError("[chart] section missing %r" % key)
    p = int(header["p"])
    window = int(header["window"])
    name = header.get("name", "chart")
    gens = [(nm, deg, ext) for nm, deg, _tag, ext in classes]
    tags = {nm: tag for nm, deg, tag, _ext in classes}
    basis_filter = None
    if basis_lines:
        sig = AlgebraSignature(
            [Generator(nm, deg, ext) for nm, deg, ext in gens], fp(p)
        )
        allowed = set()
        for d, labels in basis_lines.items():
            for label in labels:
                poly = parse_poly(label, sig) if label != "1" else Polynomial.one(sig)
                ((mono, _c),) = tuple(poly.terms.items())
                allowed.add(mono)

        def basis_filter(mono, _allowed=frozenset(allowed)):
            return mono in _allowed

    return build_chart(
        name, p, window, gens, q_raw, basis_filter=basis_filter, torsion_tags=tags,
        aliases=aliases, products=products,
    )


def load_chart(path: str) -> Chart:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_chart(fh.read())
