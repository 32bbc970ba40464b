"""Exact scalar arithmetic: multivariate polynomials over the Gaussian rationals.

Every check in the workbench reduces to "is this polynomial identically
zero", so the coefficient ring is exact by construction: rational real and
imaginary parts, sparse exponent maps, canonical form at construction time.
There is no floating-point mode and no tolerance anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union


class ParseError(ValueError):
    """Syntax or name error in a scalar expression, with position."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


class PatchMismatchError(ValueError):
    """Two values that must live on the same patch do not."""


@dataclass(frozen=True)
class Patch:
    """A coordinate patch: an ordered tuple of distinct coordinate names."""

    coords: tuple[str, ...]

    def __post_init__(self):
        if len(self.coords) < 1:
            raise ValueError("patch must have at least one coordinate")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"duplicate coordinate names: {self.coords}")
        for name in self.coords:
            if not name.isidentifier():
                raise ValueError(f"coordinate name {name!r} is not an identifier")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, name: str) -> int:
        try:
            return self.coords.index(name)
        except ValueError:
            raise KeyError(f"unknown coordinate {name!r} on patch {self.coords}") from None

    def __str__(self):
        return "(" + ", ".join(self.coords) + ")"


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class GaussRational:
    """An element of Q(i): rational real and imaginary parts.

    Fraction keeps denominators positive and in lowest terms, so equality
    is structural.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, GaussRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussRational(self.re * o.re - self.im * o.im,
                             self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussRational((self.re * o.re + self.im * o.im) / n,
                             (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    # -- printing -----------------------------------------------------------

    def __repr__(self):
        return f"GaussRational({self.re}, {self.im})"

    def __str__(self):
        return format_gauss(self)


GR_ZERO = GaussRational(0)
GR_ONE = GaussRational(1)
GR_I = GaussRational(0, 1)


def format_gauss(c: GaussRational, factor: bool = False) -> str:
    """Render a Gaussian rational.

    With factor=True the result is safe to prefix to "*monomial": mixed
    numbers get parenthesized, so e.g. (1+2*i)*x parses back correctly.
    """
    if c.re != 0 and c.im != 0:
        im = _format_imag(c.im, lead=False)
        s = f"{c.re}{'+' if c.im > 0 else '-'}{im}"
        return f"({s})" if factor else s
    if c.im != 0:
        return _format_imag(c.im, lead=True)
    return str(c.re)


def _format_imag(im: Fraction, lead: bool) -> str:
    mag = abs(im)
    body = "i" if mag == 1 else f"{mag}*i"
    if not lead:
        return body
    return body if im > 0 else "-" + body


Exponent = tuple[int, ...]


class PolyScalar:
    """Sparse multivariate polynomial over Q(i) on a fixed patch.

    terms maps exponent tuples (one entry per coordinate) to nonzero
    coefficients. Values are immutable by convention: every operation
    returns a fresh instance, nothing mutates term maps after construction.
    """

    __slots__ = ("patch", "terms")

    def __init__(self, patch: Patch, terms: Mapping[Exponent, GaussRational], *, _clean: bool = False):
        if _clean:
            tmap = dict(terms)
        else:
            tmap = {}
            for exp, coeff in terms.items():
                if len(exp) != patch.dim:
                    raise ValueError(f"exponent {exp} has wrong length for patch {patch}")
                if any(e < 0 for e in exp):
                    raise ValueError(f"negative exponent in {exp}")
                if not isinstance(coeff, GaussRational):
                    coeff = GaussRational(coeff)
                if not coeff.is_zero():
                    tmap[tuple(exp)] = coeff
        object.__setattr__(self, "patch", patch)
        object.__setattr__(self, "terms", tmap)

    def __setattr__(self, name, value):
        raise AttributeError("PolyScalar is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(patch: Patch) -> "PolyScalar":
        return PolyScalar(patch, {}, _clean=True)

    @staticmethod
    def const(patch: Patch, c) -> "PolyScalar":
        c = c if isinstance(c, GaussRational) else GaussRational(c)
        if c.is_zero():
            return PolyScalar.zero(patch)
        return PolyScalar(patch, {(0,) * patch.dim: c}, _clean=True)

    @staticmethod
    def coordinate(patch: Patch, i: int) -> "PolyScalar":
        if not 0 <= i < patch.dim:
            raise IndexError(f"coordinate index {i} out of range for {patch}")
        exp = [0] * patch.dim
        exp[i] = 1
        return PolyScalar(patch, {tuple(exp): GR_ONE}, _clean=True)

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> GaussRational:
        if self.is_zero():
            return GR_ZERO
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussRational)):
            other = PolyScalar.const(self.patch, other)
        if not isinstance(other, PolyScalar):
            return NotImplemented
        return self.patch == other.patch and self.terms == other.terms

    __hash__ = None

    def __bool__(self):
        return not self.is_zero()

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PolyScalar):
            if other.patch != self.patch:
                raise PatchMismatchError(
                    f"patch mismatch: {self.patch} vs {other.patch}")
            return other
        if isinstance(other, (int, Fraction, GaussRational)):
            return PolyScalar.const(self.patch, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for exp, c in o.terms.items():
            s = out.get(exp, GR_ZERO) + c
            if s.is_zero():
                out.pop(exp, None)
            else:
                out[exp] = s
        return PolyScalar(self.patch, out, _clean=True)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return PolyScalar(self.patch, {e: -c for e, c in self.terms.items()}, _clean=True)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.terms or not o.terms:
            return PolyScalar.zero(self.patch)
        out: dict[Exponent, GaussRational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(exp, GR_ZERO) + c1 * c2
                if s.is_zero():
                    out.pop(exp, None)
                else:
                    out[exp] = s
        return PolyScalar(self.patch, out, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = PolyScalar.const(self.patch, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- calculus -----------------------------------------------------------

    def partial(self, coord_index: int) -> "PolyScalar":
        """Formal partial derivative with respect to one coordinate."""
        if not 0 <= coord_index < self.patch.dim:
            raise IndexError(
                f"coordinate index {coord_index} out of range for {self.patch}")
        out: dict[Exponent, GaussRational] = {}
        for exp, c in self.terms.items():
            k = exp[coord_index]
            if k == 0:
                continue
            new = list(exp)
            new[coord_index] = k - 1
            out[tuple(new)] = c * k
        return PolyScalar(self.patch, out, _clean=True)

    def conjugate(self) -> "PolyScalar":
        return PolyScalar(self.patch,
                          {e: c.conjugate() for e, c in self.terms.items()},
                          _clean=True)

    def eval_at(self, point: Iterable) -> GaussRational:
        """Evaluate at a rational point (used for base-point rank checks)."""
        pt = [x if isinstance(x, GaussRational) else GaussRational(_as_fraction(x))
              for x in point]
        if len(pt) != self.patch.dim:
            raise ValueError("point has wrong dimension")
        total = GR_ZERO
        for exp, c in self.terms.items():
            v = c
            for x, e in zip(pt, exp):
                for _ in range(e):
                    v = v * x
            total = total + v
        return total

    # -- printing -----------------------------------------------------------

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"<PolyScalar {format_poly(self)} on {self.patch}>"


Scalarish = Union[PolyScalar, GaussRational, Fraction, int]


def format_poly(p: PolyScalar) -> str:
    """Canonical rendering; parse(format(p)) == p.

    Terms are ordered by total degree then exponent tuple, both descending,
    so output is deterministic.
    """
    if not p.terms:
        return "0"
    keys = sorted(p.terms, key=lambda e: (sum(e), e), reverse=True)
    parts = []
    for exp in keys:
        c = p.terms[exp]
        mono = "*".join(
            name if e == 1 else f"{name}^{e}"
            for name, e in zip(p.patch.coords, exp) if e > 0)
        if not mono:
            s = format_gauss(c)
        elif c == GR_ONE:
            s = mono
        elif c == -GR_ONE:
            s = "-" + mono
        else:
            s = f"{format_gauss(c, factor=True)}*{mono}"
        parts.append(s)
    out = parts[0]
    for s in parts[1:]:
        if s.startswith("-"):
            out += " - " + s[1:]
        else:
            out += " + " + s
    return out


# -- expression parser -------------------------------------------------------
#
# Grammar: integers, rationals a/b, the imaginary unit i, coordinate names,
# + - * ^ ( ).  ^ takes nonnegative integer exponents only.

_TOKEN_OPS = set("+-*^()")


def _tokenize(text: str):
    tokens = []  # (kind, value, pos)
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _TOKEN_OPS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch == "/":
            tokens.append(("/", "/", i))
            i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", text, i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str, patch: Patch):
        self.text = text
        self.patch = patch
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[0]}", self.text, tok[2])
        self.pos += 1
        return tok

    def parse(self) -> PolyScalar:
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"trailing input {tok[1]!r}", self.text, tok[2])
        return value

    def expr(self) -> PolyScalar:
        # leading sign
        tok = self.peek()
        if tok[0] in "+-":
            self.take()
            value = self.term()
            if tok[0] == "-":
                value = -value
        else:
            value = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> PolyScalar:
        value = self.factor()
        while self.peek()[0] == "*":
            self.take()
            value = value * self.factor()
        return value

    def factor(self) -> PolyScalar:
        tok = self.peek()
        if tok[0] in "+-":
            self.take()
            inner = self.factor()
            return inner if tok[0] == "+" else -inner
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            etok = self.take("int")
            base = base ** etok[1]
        return base

    def atom(self) -> PolyScalar:
        tok = self.take()
        kind, value, pos = tok
        if kind == "int":
            num = value
            if self.peek()[0] == "/":
                self.take()
                dtok = self.take("int")
                if dtok[1] == 0:
                    raise ParseError("zero denominator", self.text, dtok[2])
                return PolyScalar.const(self.patch, Fraction(num, dtok[1]))
            return PolyScalar.const(self.patch, num)
        if kind == "(":
            inner = self.expr()
            self.take(")")
            return inner
        if kind == "name":
            if value == "i":
                return PolyScalar.const(self.patch, GR_I)
            try:
                idx = self.patch.index(value)
            except KeyError:
                raise ParseError(f"unknown coordinate {value!r}", self.text, pos) from None
            return PolyScalar.coordinate(self.patch, idx)
        raise ParseError(f"unexpected token {value!r}", self.text, pos)


def parse_poly(text: str, patch: Patch) -> PolyScalar:
    """Parse an expression in the scalar grammar to canonical form."""
    return _Parser(text, patch).parse()
