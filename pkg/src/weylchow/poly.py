"""Exact sparse multivariate polynomials over small coefficient domains.

A polynomial lives in a graded-commutative algebra described by an
AlgebraSignature: an ordered list of named generators, each with a
topological degree and a polynomial/exterior parity flag, plus a
coefficient domain.  Supported domains are F_p (p in {2, 3, 5}), the
integers, the rationals, and the p-local rationals Z_(p) (fractions whose
denominator is coprime to p).

Representation: a monomial is a tuple of non-negative exponents, one per
generator; a polynomial is a dict mapping monomials to nonzero
coefficients.  All arithmetic is exact; zero coefficients are never
stored, so equality is structural.

Multiplication carries the Koszul sign: generators of odd topological
degree anticommute.  Exterior generators square to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

Monomial = Tuple[int, ...]


class PolyError(Exception):
    """Malformed signature, domain violation, or parse failure."""


# ---------------------------------------------------------------------------
# Coefficient domains
# ---------------------------------------------------------------------------

_FP_PRIMES = (2, 3, 5)


@dataclass(frozen=True)
class Domain:
    """Tag for one of the four exact coefficient domains.

    kind is one of "fp", "int", "rat", "plocal"; p is the prime for
    "fp"/"plocal" and None otherwise.
    """

    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == "fp":
            if self.p not in _FP_PRIMES:
                raise PolyError("F_p supported only for p in %s" % (_FP_PRIMES,))
        elif self.kind == "plocal":
            if self.p is None or self.p < 2:
                raise PolyError("Z_(p) needs a prime p")
        elif self.kind in ("int", "rat"):
            if self.p is not None:
                raise PolyError("domain %r takes no prime" % self.kind)
        else:
            raise PolyError("unknown domain kind %r" % self.kind)

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "fp" else 0

    def coerce(self, value):
        """Normalize a raw int/Fraction into this domain; check p-locality."""
        if self.kind == "fp":
            if isinstance(value, Fraction):
                if value.denominator % self.p == 0:
                    raise PolyError("denominator divisible by %d in F_%d" % (self.p, self.p))
                inv = pow(value.denominator % self.p, self.p - 2, self.p)
                return (value.numerator * inv) % self.p
            return int(value) % self.p
        if self.kind == "int":
            if isinstance(value, Fraction):
                if value.denominator != 1:
                    raise PolyError("non-integer coefficient %s over Z" % value)
                return int(value)
            return int(value)
        frac = Fraction(value)
        if self.kind == "plocal" and frac.denominator % self.p == 0:
            raise PolyError(
                "denominator of %s divisible by %d is not %d-local" % (frac, self.p, self.p)
            )
        return frac

    def add(self, a, b):
        if self.kind == "fp":
            return (a + b) % self.p
        return self.coerce(a + b)

    def mul(self, a, b):
        if self.kind == "fp":
            return (a * b) % self.p
        return self.coerce(a * b)

    def neg(self, a):
        if self.kind == "fp":
            return (-a) % self.p
        return -a

    def __str__(self):
        if self.kind == "fp":
            return "F_%d" % self.p
        if self.kind == "plocal":
            return "Z_(%d)" % self.p
        return {"int": "Z", "rat": "Q"}[self.kind]


F2 = Domain("fp", 2)
F3 = Domain("fp", 3)
F5 = Domain("fp", 5)
ZZ = Domain("int")
QQ = Domain("rat")


def z_local(p: int) -> Domain:
    return Domain("plocal", p)


def fp(p: int) -> Domain:
    return Domain("fp", p)


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    exterior: bool = False


class AlgebraSignature:
    """Ordered generator list plus coefficient domain.

    Generator names must be unique, degrees >= 1.  Exterior generators are
    allowed only over F_p; over domains of characteristic != 2, odd-degree
    generators must be exterior (graded commutativity forces their squares
    to vanish).
    """

    __slots__ = ("generators", "domain", "_index", "_degrees")

    def __init__(self, generators: Iterable[Generator], domain: Domain):
        gens = tuple(generators)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise PolyError("duplicate generator names")
        for g in gens:
            if g.degree < 1:
                raise PolyError("generator %s has degree %d < 1" % (g.name, g.degree))
            if g.exterior and domain.kind != "fp":
                raise PolyError("exterior generator %s requires an F_p domain" % g.name)
            if g.degree % 2 == 1 and not g.exterior and domain.characteristic != 2:
                raise PolyError(
                    "odd-degree generator %s must be exterior over %s" % (g.name, domain)
                )
        self.generators = gens
        self.domain = domain
        self._index = {g.name: i for i, g in enumerate(gens)}
        self._degrees = tuple(g.degree for g in gens)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise PolyError("unknown generator %r" % name) from None

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def mono_degree(self, mono: Monomial) -> int:
        return sum(e * d for e, d in zip(mono, self._degrees))

    def __len__(self):
        return len(self.generators)

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraSignature)
            and self.generators == other.generators
            and self.domain == other.domain
        )

    def __hash__(self):
        return hash((self.generators, self.domain))

    def __repr__(self):
        gens = ", ".join(
            "%s:%d%s" % (g.name, g.degree, "^" if g.exterior else "") for g in self.generators
        )
        return "AlgebraSignature([%s], %s)" % (gens, self.domain)


def signature(gens: Iterable[Tuple], domain: Domain) -> AlgebraSignature:
    """Build a signature from (name, degree) or (name, degree, exterior) tuples."""
    out = []
    for spec in gens:
        if len(spec) == 2:
            out.append(Generator(spec[0], spec[1]))
        else:
            out.append(Generator(spec[0], spec[1], spec[2]))
    return AlgebraSignature(out, domain)


# ---------------------------------------------------------------------------
# Monomial helpers
# ---------------------------------------------------------------------------


def mono_mul(sig: AlgebraSignature, m1: Monomial, m2: Monomial):
    """Product of two monomials: (sign, monomial), or None when it vanishes.

    Vanishing happens when an exterior generator would reach exponent >= 2.
    The sign counts transpositions of odd-degree factors of m2 moving left
    past higher-indexed odd-degree factors of m1.
    """
    out = []
    sign = 1
    gens = sig.generators
    if sig.domain.characteristic != 2:
        odd1 = [e if g.degree % 2 else 0 for e, g in zip(m1, gens)]
        suffix = [0] * (len(gens) + 1)
        for i in range(len(gens) - 1, -1, -1):
            suffix[i] = suffix[i + 1] + odd1[i]
        swaps = 0
        for j, g in enumerate(gens):
            if g.degree % 2 and m2[j]:
                swaps += m2[j] * suffix[j + 1]
        if swaps % 2:
            sign = -1
    for e1, e2, g in zip(m1, m2, gens):
        e = e1 + e2
        if g.exterior and e > 1:
            return None
        out.append(e)
    return sign, tuple(out)


def grlex_key(sig: AlgebraSignature, mono: Monomial):
    return (sig.mono_degree(mono), mono)


def degree_slice(sig: AlgebraSignature, n: int) -> List[Monomial]:
    """All monomials of total degree exactly n, in graded-lex order."""
    if n < 0:
        raise PolyError("degree must be non-negative")
    gens = sig.generators
    results: List[Monomial] = []

    def rec(idx: int, remaining: int, prefix: List[int]):
        if idx == len(gens):
            if remaining == 0:
                results.append(tuple(prefix))
            return
        g = gens[idx]
        max_e = remaining // g.degree
        if g.exterior:
            max_e = min(max_e, 1)
        for e in range(max_e + 1):
            prefix.append(e)
            rec(idx + 1, remaining - e * g.degree, prefix)
            prefix.pop()

    rec(0, n, [])
    results.sort()
    return results


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Immutable sparse polynomial in a fixed signature."""

    __slots__ = ("sig", "terms")

    def __init__(self, sig: AlgebraSignature, terms: Dict[Monomial, object], _clean=False):
        self.sig = sig
        if _clean:
            self.terms = terms
        else:
            dom = sig.domain
            clean: Dict[Monomial, object] = {}
            for mono, coeff in terms.items():
                if len(mono) != len(sig):
                    raise PolyError("monomial arity mismatch")
                for e, g in zip(mono, sig.generators):
                    if e < 0:
                        raise PolyError("negative exponent")
                    if g.exterior and e > 1:
                        raise PolyError("exterior generator %s squared" % g.name)
                c = dom.coerce(coeff)
                if c != 0:
                    clean[mono] = c
            self.terms = clean

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zero(sig: AlgebraSignature) -> "Polynomial":
        return Polynomial(sig, {}, _clean=True)

    @staticmethod
    def one(sig: AlgebraSignature) -> "Polynomial":
        return Polynomial(sig, {(0,) * len(sig): sig.domain.coerce(1)})

    @staticmethod
    def constant(sig: AlgebraSignature, c) -> "Polynomial":
        return Polynomial(sig, {(0,) * len(sig): c})

    @staticmethod
    def gen(sig: AlgebraSignature, name: str) -> "Polynomial":
        mono = [0] * len(sig)
        mono[sig.index(name)] = 1
        return Polynomial(sig, {tuple(mono): 1})

    @staticmethod
    def from_mono(sig: AlgebraSignature, mono: Monomial, c=1) -> "Polynomial":
        return Polynomial(sig, {tuple(mono): c})

    # -- structure --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> List[Monomial]:
        return sorted(self.terms, key=lambda m: grlex_key(self.sig, m))

    def coefficient(self, mono: Monomial):
        return self.terms.get(tuple(mono), self.sig.domain.coerce(0))

    def degree(self) -> int:
        """Top total degree; zero polynomial has degree 0 by convention."""
        if not self.terms:
            return 0
        return max(self.sig.mono_degree(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {self.sig.mono_degree(m) for m in self.terms}
        return len(degs) <= 1

    def homogeneous_part(self, n: int) -> "Polynomial":
        sig = self.sig
        return Polynomial(
            sig,
            {m: c for m, c in self.terms.items() if sig.mono_degree(m) == n},
            _clean=True,
        )

    def homogeneous_degrees(self) -> List[int]:
        return sorted({self.sig.mono_degree(m) for m in self.terms})

    # -- arithmetic -------------------------------------------------------

    def _check_sig(self, other: "Polynomial"):
        if self.sig != other.sig:
            raise PolyError("signature mismatch")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_sig(other)
        dom = self.sig.domain
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = dom.add(out.get(mono, 0), c)
            if s == 0:
                out.pop(mono, None)
            else:
                out[mono] = s
        return Polynomial(self.sig, out, _clean=True)

    def __neg__(self) -> "Polynomial":
        dom = self.sig.domain
        return Polynomial(self.sig, {m: dom.neg(c) for m, c in self.terms.items()}, _clean=True)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        dom = self.sig.domain
        c = dom.coerce(c)
        if c == 0:
            return Polynomial.zero(self.sig)
        out = {}
        for mono, a in self.terms.items():
            v = dom.mul(a, c)
            if v != 0:
                out[mono] = v
        return Polynomial(self.sig, out, _clean=True)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_sig(other)
        sig = self.sig
        dom = sig.domain
        out: Dict[Monomial, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                prod = mono_mul(sig, m1, m2)
                if prod is None:
                    continue
                sign, mono = prod
                c = dom.mul(c1, c2)
                if sign < 0:
                    c = dom.neg(c)
                s = dom.add(out.get(mono, 0), c)
                if s == 0:
                    out.pop(mono, None)
                else:
                    out[mono] = s
        return Polynomial(sig, out, _clean=True)

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise PolyError("negative power")
        result = Polynomial.one(self.sig)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.sig == other.sig
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.sig, tuple(sorted(self.terms.items()))))

    # -- substitution -----------------------------------------------------

    def substitute(self, images: Dict[str, "Polynomial"]) -> "Polynomial":
        """Evaluate the ring homomorphism sending each generator to its image.

        Every generator appearing in this polynomial must have an image, and
        each image must be homogeneous of the generator's degree (in the
        image's own signature).
        """
        sig = self.sig
        used = [i for i in range(len(sig)) if any(m[i] for m in self.terms)]
        if not used:
            # Constant: reinterpret in the target signature if one is implied.
            target_sig = None
            for img in images.values():
                target_sig = img.sig
                break
            if target_sig is None:
                target_sig = sig
            out = Polynomial.zero(target_sig)
            for mono, c in self.terms.items():
                out = out + Polynomial.constant(target_sig, c)
            return out
        target_sig = None
        for i in used:
            name = sig.generators[i].name
            if name not in images:
                raise PolyError("no image for generator %r" % name)
            img = images[name]
            if target_sig is None:
                target_sig = img.sig
            elif img.sig != target_sig:
                raise PolyError("images live in different signatures")
            if not img.is_homogeneous():
                raise PolyError("image of %s is not homogeneous" % name)
            if not img.is_zero() and img.degree() != sig.generators[i].degree:
                raise PolyError(
                    "image of %s has degree %d, expected %d"
                    % (name, img.degree(), sig.generators[i].degree)
                )
        assert target_sig is not None
        power_cache: Dict[Tuple[int, int], Polynomial] = {}

        def gen_power(i: int, e: int) -> Polynomial:
            key = (i, e)
            if key not in power_cache:
                power_cache[key] = images[sig.generators[i].name] ** e
            return power_cache[key]

        result = Polynomial.zero(target_sig)
        for mono, c in self.terms.items():
            term = Polynomial.constant(target_sig, c)
            for i, e in enumerate(mono):
                if e:
                    term = term * gen_power(i, e)
            result = result + term
        return result

    # -- printing ---------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        sig = self.sig
        monos = sorted(self.terms, key=lambda m: grlex_key(sig, m), reverse=True)
        parts: List[str] = []
        for mono in monos:
            c = self.terms[mono]
            factors = []
            for e, g in zip(mono, sig.generators):
                if e == 1:
                    factors.append(g.name)
                elif e > 1:
                    factors.append("%s^%d" % (g.name, e))
            body = "*".join(factors)
            neg = c < 0 if not isinstance(c, bool) else False
            mag = -c if neg else c
            if body and mag == 1:
                text = body
            elif body:
                text = "%s*%s" % (mag, body)
            else:
                text = str(mag)
            if not parts:
                parts.append("-" + text if neg else text)
            else:
                parts.append(("- " if neg else "+ ") + text)
        return " ".join(parts)

    def __repr__(self):
        return "Polynomial(%s)" % self


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        self.skip_ws()
        ch = self.text[self.pos]
        self.pos += 1
        return ch

    def expect(self, ch: str):
        got = self.take() if self.peek() else ""
        if got != ch:
            raise PolyError("expected %r at position %d" % (ch, self.pos))

    def read_uint(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise PolyError("expected integer at position %d" % start)
        return int(self.text[start : self.pos])

    def read_name(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        if self.pos == start:
            raise PolyError("expected name at position %d" % start)
        return self.text[start : self.pos]


def parse(text: str, sig: AlgebraSignature) -> Polynomial:
    """Parse the grammar: expr := term (('+'|'-') term)*;
    term := coeff ('*' factor)* | factor ('*' factor)*;
    factor := name ('^' uint)? | '(' expr ')'; coeff := int ('/' uint)?.
    """
    toks = _Tokens(text)
    poly = _parse_expr(toks, sig)
    toks.skip_ws()
    if toks.pos != len(text):
        raise PolyError("trailing input at position %d" % toks.pos)
    return poly


def _parse_expr(toks: _Tokens, sig: AlgebraSignature) -> Polynomial:
    result = _parse_term(toks, sig)
    while True:
        ch = toks.peek()
        if ch == "+":
            toks.take()
            result = result + _parse_term(toks, sig)
        elif ch == "-":
            toks.take()
            result = result - _parse_term(toks, sig)
        else:
            return result


def _parse_term(toks: _Tokens, sig: AlgebraSignature) -> Polynomial:
    ch = toks.peek()
    if ch.isdigit():
        num = toks.read_uint()
        if toks.peek() == "/":
            toks.take()
            den = toks.read_uint()
            coeff = Fraction(num, den)
        else:
            coeff = Fraction(num)
        result = Polynomial.constant(sig, coeff)
    else:
        result = _parse_factor(toks, sig)
    while toks.peek() == "*":
        toks.take()
        result = result * _parse_factor(toks, sig)
    return result


def _parse_factor(toks: _Tokens, sig: AlgebraSignature) -> Polynomial:
    ch = toks.peek()
    if ch == "(":
        toks.take()
        inner = _parse_expr(toks, sig)
        toks.expect(")")
        base = inner
    elif ch.isalpha() or ch == "_":
        name = toks.read_name()
        base = Polynomial.gen(sig, name)
    else:
        raise PolyError("unexpected character %r at position %d" % (ch, toks.pos))
    if toks.peek() == "^":
        toks.take()
        e = toks.read_uint()
        return base**e
    return base
