"""Exterior calculus of multivector fields and differential forms on a patch.

Components are stored on strictly increasing index tuples (antisymmetric
canonical form).  Sign conventions, fixed once and pinned by tests:

  * interior products contract the first slot,
  * the graded bracket of multivectors restricts to the Lie bracket on
    vector fields and to [X, f] = X(f) on functions,
  * evaluation of a k-tensor on k arguments is the determinant pairing,
    so (d/dx ^ d/dy)(dx, dy) = 1.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union

from .scalar import (GR_ONE, GR_ZERO, GaussRational, Patch, PatchMismatchError,
                     PolyScalar, Scalarish)

Index = tuple[int, ...]


class DegreeError(ValueError):
    """Operation applied to a tensor of the wrong degree or kind."""


def sort_index(idx: Sequence[int]) -> tuple[Index, int]:
    """Sort an index tuple, returning (sorted tuple, permutation sign).

    Sign 0 marks a repeated index (the component vanishes).
    """
    idx = list(idx)
    sign = 1
    # insertion sort; tuples are tiny
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return tuple(idx), 0
    return tuple(idx), sign


def merge_indices(left: Index, right: Index) -> tuple[Index, int] | None:
    """Merge two increasing tuples; None if they share an index."""
    if set(left) & set(right):
        return None
    merged, sign = sort_index(left + right)
    return merged, sign


class _Alternating:
    """Shared machinery for Multivector and DiffForm.

    comps maps strictly increasing index tuples to nonzero PolyScalar
    coefficients; degree 0 stores a single scalar under ().  A degree above
    the patch dimension is allowed only for the zero tensor, so that graded
    operations can return results of the formally correct degree.
    """

    __slots__ = ("patch", "k", "comps")

    def __init__(self, patch: Patch, k: int,
                 comps: Mapping[Index, PolyScalar], *, _clean: bool = False):
        if _clean:
            cmap = dict(comps)
        else:
            cmap = {}
            for idx, coeff in comps.items():
                if len(idx) != k:
                    raise ValueError(f"index {idx} has wrong length for degree {k}")
                if coeff.patch != patch:
                    raise PatchMismatchError("component patch differs from tensor patch")
                sidx, sign = sort_index(idx)
                if sign == 0 or coeff.is_zero():
                    continue
                value = coeff if sign == 1 else -coeff
                prev = cmap.get(sidx)
                total = value if prev is None else prev + value
                if total.is_zero():
                    cmap.pop(sidx, None)
                else:
                    cmap[sidx] = total
            if any(i < 0 or i >= patch.dim for idx in cmap for i in idx):
                raise ValueError("component index out of range")
        if k < 0:
            raise ValueError("negative degree")
        if k > patch.dim and cmap:
            raise ValueError(f"nonzero degree-{k} tensor on {patch.dim}-dim patch")
        object.__setattr__(self, "patch", patch)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "comps", cmap)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, patch: Patch, k: int):
        return cls(patch, k, {}, _clean=True)

    @classmethod
    def from_scalar(cls, f: PolyScalar):
        if f.is_zero():
            return cls.zero(f.patch, 0)
        return cls(f.patch, 0, {(): f}, _clean=True)

    @classmethod
    def basis(cls, patch: Patch, i: int):
        """d/dx_i for multivectors, dx_i for forms."""
        if not 0 <= i < patch.dim:
            raise IndexError(f"basis index {i} out of range")
        return cls(patch, 1, {(i,): PolyScalar.const(patch, 1)}, _clean=True)

    @classmethod
    def from_components(cls, patch: Patch, comps: Sequence[Scalarish]):
        """Degree-1 tensor from a full component list."""
        cmap = {}
        for i, c in enumerate(comps):
            if not isinstance(c, PolyScalar):
                c = PolyScalar.const(patch, c)
            if not c.is_zero():
                cmap[(i,)] = c
        return cls(patch, 1, cmap, _clean=True)

    # -- queries ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.comps

    def component(self, idx: Sequence[int]) -> PolyScalar:
        sidx, sign = sort_index(idx)
        if sign == 0:
            return PolyScalar.zero(self.patch)
        c = self.comps.get(sidx)
        if c is None:
            return PolyScalar.zero(self.patch)
        return c if sign == 1 else -c

    def scalar(self) -> PolyScalar:
        if self.k != 0:
            raise DegreeError("scalar() requires degree 0")
        return self.comps.get((), PolyScalar.zero(self.patch))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (self.patch == other.patch and self.k == other.k
                and self.comps == other.comps)

    __hash__ = None

    def _require_same_patch(self, other):
        if self.patch != other.patch:
            raise PatchMismatchError(
                f"patch mismatch: {self.patch} vs {other.patch}")

    # -- linear structure ----------------------------------------------------

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        self._require_same_patch(other)
        if self.k != other.k:
            raise DegreeError(f"degree mismatch: {self.k} vs {other.k}")
        out = dict(self.comps)
        for idx, c in other.comps.items():
            s = out.get(idx)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
        return type(self)(self.patch, self.k, out, _clean=True)

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return type(self)(self.patch, self.k,
                          {i: -c for i, c in self.comps.items()}, _clean=True)

    def __mul__(self, f: Scalarish):
        """Multiplication by a scalar (function or constant)."""
        if isinstance(f, (int, Fraction, GaussRational)):
            f = PolyScalar.const(self.patch, f)
        if not isinstance(f, PolyScalar):
            return NotImplemented
        if f.patch != self.patch:
            raise PatchMismatchError("scalar lives on a different patch")
        out = {}
        for idx, c in self.comps.items():
            p = c * f
            if not p.is_zero():
                out[idx] = p
        return type(self)(self.patch, self.k, out, _clean=True)

    __rmul__ = __mul__

    def conjugate(self):
        return type(self)(self.patch, self.k,
                          {i: c.conjugate() for i, c in self.comps.items()},
                          _clean=True)

    def is_real(self) -> bool:
        return self.conjugate() == self

    def wedge(self, other):
        if type(other) is not type(self):
            raise DegreeError("wedge requires tensors of the same kind")
        self._require_same_patch(other)
        k = self.k + other.k
        out: dict[Index, PolyScalar] = {}
        if k > self.patch.dim:
            return type(self).zero(self.patch, k)
        for i1, c1 in self.comps.items():
            for i2, c2 in other.comps.items():
                merged = merge_indices(i1, i2)
                if merged is None:
                    continue
                idx, sign = merged
                term = c1 * c2 if sign == 1 else -(c1 * c2)
                s = out.get(idx)
                s = term if s is None else s + term
                if s.is_zero():
                    out.pop(idx, None)
                else:
                    out[idx] = s
        return type(self)(self.patch, k, out, _clean=True)

    # -- printing -----------------------------------------------------------

    def _basis_symbol(self, i: int) -> str:
        raise NotImplementedError

    def __str__(self):
        if not self.comps:
            return "0"
        keys = sorted(self.comps)
        parts = []
        for idx in keys:
            c = self.comps[idx]
            mono = "^".join(self._basis_symbol(i) for i in idx)
            if not mono:
                parts.append(str(c))
                continue
            if c == PolyScalar.const(self.patch, 1):
                parts.append(mono)
            elif c == PolyScalar.const(self.patch, -1):
                parts.append("-" + mono)
            else:
                cs = str(c)
                if len(c.terms) > 1:
                    cs = f"({cs})"
                parts.append(f"{cs}*{mono}")
        out = parts[0]
        for s in parts[1:]:
            if s.startswith("-"):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out

    def __repr__(self):
        return f"<{type(self).__name__} k={self.k} {self}>"


class Multivector(_Alternating):
    """Antisymmetric contravariant tensor field (k-vector field)."""

    def _basis_symbol(self, i: int) -> str:
        return f"d/d{self.patch.coords[i]}"


class DiffForm(_Alternating):
    """Antisymmetric covariant tensor field (differential k-form)."""

    def _basis_symbol(self, i: int) -> str:
        return f"d{self.patch.coords[i]}"


VectorField = Multivector   # degree 1, by convention
OneForm = DiffForm          # degree 1, by convention


# -- contraction and evaluation ----------------------------------------------

def interior_product(a, t):
    """Contraction on the first slot.

    a is a 1-form and t a multivector, or a is a vector field and t a form.
    Returns a tensor of t's kind with degree lowered by one.
    """
    if isinstance(a, DiffForm) and isinstance(t, Multivector):
        pass
    elif isinstance(a, Multivector) and isinstance(t, DiffForm):
        pass
    else:
        raise DegreeError("interior product pairs a 1-tensor with the opposite kind")
    if a.k != 1:
        raise DegreeError("contraction argument must have degree 1")
    if t.k == 0:
        raise DegreeError("cannot contract a degree-0 tensor")
    a._require_same_patch(t)
    out: dict[Index, PolyScalar] = {}
    for idx, c in t.comps.items():
        for pos, i in enumerate(idx):
            ai = a.comps.get((i,))
            if ai is None:
                continue
            rest = idx[:pos] + idx[pos + 1:]
            term = ai * c
            if pos % 2 == 1:
                term = -term
            s = out.get(rest)
            s = term if s is None else s + term
            if s.is_zero():
                out.pop(rest, None)
            else:
                out[rest] = s
    return type(t)(t.patch, t.k - 1, out, _clean=True)


def evaluate(t, args: Sequence) -> PolyScalar:
    """Evaluate a degree-k tensor on k arguments of the opposite kind."""
    if len(args) != t.k:
        raise DegreeError(f"need {t.k} arguments, got {len(args)}")
    cur = t
    for a in args:
        cur = interior_product(a, cur)
    return cur.scalar()


def pair(alpha: DiffForm, x: Multivector) -> PolyScalar:
    """<alpha, X> for a 1-form and a vector field."""
    if alpha.k != 1 or x.k != 1:
        raise DegreeError("pairing requires two degree-1 tensors")
    alpha._require_same_patch(x)
    total = PolyScalar.zero(alpha.patch)
    small, big = (alpha.comps, x.comps) if len(alpha.comps) <= len(x.comps) else (x.comps, alpha.comps)
    for idx, c in small.items():
        o = big.get(idx)
        if o is not None:
            total = total + c * o
    return total


# -- derivatives --------------------------------------------------------------

def lie_bracket(x: Multivector, y: Multivector) -> Multivector:
    """Lie bracket of vector fields."""
    if x.k != 1 or y.k != 1:
        raise DegreeError("Lie bracket requires vector fields")
    x._require_same_patch(y)
    patch = x.patch
    out: dict[Index, PolyScalar] = {}
    for (j,), xj in x.comps.items():
        for (i,), yi in y.comps.items():
            d = yi.partial(j)
            if not d.is_zero():
                _accumulate(out, (i,), xj * d)
    for (j,), yj in y.comps.items():
        for (i,), xi in x.comps.items():
            d = xi.partial(j)
            if not d.is_zero():
                _accumulate(out, (i,), -(yj * d))
    return Multivector(patch, 1, out, _clean=True)


def _accumulate(out: dict, idx: Index, value: PolyScalar):
    s = out.get(idx)
    s = value if s is None else s + value
    if s.is_zero():
        out.pop(idx, None)
    else:
        out[idx] = s


def exterior_derivative(w: DiffForm) -> DiffForm:
    """d on forms; d(d(w)) = 0."""
    if not isinstance(w, DiffForm):
        raise DegreeError("exterior derivative acts on forms")
    patch = w.patch
    out: dict[Index, PolyScalar] = {}
    for idx, c in w.comps.items():
        for j in range(patch.dim):
            if j in idx:
                continue
            d = c.partial(j)
            if d.is_zero():
                continue
            pos = sum(1 for i in idx if i < j)
            merged, _ = sort_index((j,) + idx)
            _accumulate(out, merged, d if pos % 2 == 0 else -d)
    return DiffForm(patch, w.k + 1, out, _clean=True)


def d_scalar(f: PolyScalar) -> DiffForm:
    """Differential of a function as a 1-form."""
    return exterior_derivative(DiffForm.from_scalar(f))


def _theta_derivative(u, i: int):
    """Left odd derivative: strip index i from each component, with sign."""
    out: dict[Index, PolyScalar] = {}
    for idx, c in u.comps.items():
        for pos, j in enumerate(idx):
            if j == i:
                rest = idx[:pos] + idx[pos + 1:]
                out[rest] = c if pos % 2 == 0 else -c
                break
    return type(u)(u.patch, max(u.k - 1, 0), out, _clean=True)


def _coefficient_partial(u, i: int):
    out = {}
    for idx, c in u.comps.items():
        d = c.partial(i)
        if not d.is_zero():
            out[idx] = d
    return type(u)(u.patch, u.k, out, _clean=True)


def schouten_bracket(u: Multivector, v: Multivector) -> Multivector:
    """Graded bracket of multivector fields.

    Normalization: restricts to the Lie bracket on vector fields, with
    [X, f] = X(f) and [u, f] = i(df) u, and the coboundary w -> -[pi, w]
    reproduces the argument-expansion formula at every degree (the agreement
    test in the cohomology suite is the anchor).  Under these pins the
    bracket satisfies [u, v] = (-1)^(pq) [v, u] and the graded Jacobi
    identity in the form asserted by the property tests.
    """
    if not isinstance(u, Multivector) or not isinstance(v, Multivector):
        raise DegreeError("graded bracket acts on multivectors")
    u._require_same_patch(v)
    p, q = u.k, v.k
    k = p + q - 1
    if k < 0:  # two functions
        return Multivector.zero(u.patch, 0)
    s2 = 1 if p % 2 == 0 else -1
    result = Multivector.zero(u.patch, k)
    for i in range(u.patch.dim):
        du = _theta_derivative(u, i)
        if not du.is_zero():
            dv = _coefficient_partial(v, i)
            if not dv.is_zero():
                result = result + du.wedge(dv)
    for i in range(u.patch.dim):
        du = _coefficient_partial(u, i)
        if not du.is_zero():
            dv = _theta_derivative(v, i)
            if not dv.is_zero():
                term = du.wedge(dv)
                result = result + (term if s2 == 1 else -term)
    return result


def lie_derivative(x: Multivector, t):
    """Lie derivative along a vector field.

    Cartan formula on forms, graded bracket on multivectors, X(f) on
    scalars.  Preserves degree.
    """
    if x.k != 1:
        raise DegreeError("Lie derivative direction must be a vector field")
    if isinstance(t, PolyScalar):
        total = PolyScalar.zero(t.patch)
        for (i,), c in x.comps.items():
            total = total + c * t.partial(i)
        return total
    if isinstance(t, Multivector):
        return schouten_bracket(x, t)
    if isinstance(t, DiffForm):
        if t.k == 0:
            return DiffForm.from_scalar(lie_derivative(x, t.scalar()))
        inner = exterior_derivative(interior_product(x, t))
        outer = interior_product(x, exterior_derivative(t))
        return inner + outer
    raise DegreeError(f"cannot take Lie derivative of {type(t).__name__}")


# -- musical maps and endomorphisms -------------------------------------------

def sharp(pi: Multivector, alpha: DiffForm) -> Multivector:
    """Bivector-induced map of a 1-form to a vector field: i(alpha) pi."""
    if pi.k != 2:
        raise DegreeError("sharp requires a bivector")
    return interior_product(alpha, pi)


def flat(sigma: DiffForm, x: Multivector) -> DiffForm:
    """2-form-induced map of a vector field to a 1-form: i(X) sigma."""
    if sigma.k != 2:
        raise DegreeError("flat requires a 2-form")
    return interior_product(x, sigma)


class Endomorphism:
    """A (1,1)-tensor field on a patch: (A X)^i = A^i_j X^j.

    rows[i][j] holds A^i_j.  Acts on 1-forms by precomposition,
    (A* alpha)_j = alpha_i A^i_j.
    """

    __slots__ = ("patch", "rows")

    def __init__(self, patch: Patch, rows: Sequence[Sequence[PolyScalar]]):
        n = patch.dim
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"matrix must be {n}x{n}")
        rs = []
        for row in rows:
            r = []
            for entry in row:
                if not isinstance(entry, PolyScalar):
                    entry = PolyScalar.const(patch, entry)
                elif entry.patch != patch:
                    raise PatchMismatchError("entry on wrong patch")
                r.append(entry)
            rs.append(tuple(r))
        object.__setattr__(self, "patch", patch)
        object.__setattr__(self, "rows", tuple(rs))

    def __setattr__(self, name, value):
        raise AttributeError("Endomorphism is immutable")

    @staticmethod
    def zero(patch: Patch) -> "Endomorphism":
        z = PolyScalar.zero(patch)
        return Endomorphism(patch, [[z] * patch.dim for _ in range(patch.dim)])

    @staticmethod
    def identity(patch: Patch) -> "Endomorphism":
        one = PolyScalar.const(patch, 1)
        z = PolyScalar.zero(patch)
        return Endomorphism(patch, [[one if i == j else z for j in range(patch.dim)]
                                    for i in range(patch.dim)])

    @staticmethod
    def from_strings(patch: Patch, rows: Sequence[Sequence[str]]) -> "Endomorphism":
        from .scalar import parse_poly
        return Endomorphism(patch, [[parse_poly(e, patch) for e in row] for row in rows])

    @staticmethod
    def outer(z: Multivector, xi: DiffForm) -> "Endomorphism":
        """Rank-one operator xi (x) Z, sending X to xi(X) Z."""
        if z.k != 1 or xi.k != 1:
            raise DegreeError("outer product needs a vector field and a 1-form")
        z._require_same_patch(xi)
        patch = z.patch
        zero = PolyScalar.zero(patch)
        rows = []
        for i in range(patch.dim):
            zi = z.comps.get((i,))
            if zi is None:
                rows.append([zero] * patch.dim)
                continue
            rows.append([zi * xi.comps[(j,)] if (j,) in xi.comps else zero
                         for j in range(patch.dim)])
        return Endomorphism(patch, rows)

    def entry(self, i: int, j: int) -> PolyScalar:
        return self.rows[i][j]

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.rows for e in row)

    def __eq__(self, other):
        if not isinstance(other, Endomorphism):
            return NotImplemented
        return self.patch == other.patch and self.rows == other.rows

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, Endomorphism):
            return NotImplemented
        if self.patch != other.patch:
            raise PatchMismatchError("patch mismatch")
        return Endomorphism(self.patch,
                            [[a + b for a, b in zip(r1, r2)]
                             for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Endomorphism(self.patch, [[-e for e in row] for row in self.rows])

    def __mul__(self, f: Scalarish):
        if isinstance(f, (int, Fraction, GaussRational)):
            f = PolyScalar.const(self.patch, f)
        if not isinstance(f, PolyScalar):
            return NotImplemented
        return Endomorphism(self.patch, [[e * f for e in row] for row in self.rows])

    __rmul__ = __mul__

    def compose(self, other: "Endomorphism") -> "Endomorphism":
        """Matrix product self . other."""
        if self.patch != other.patch:
            raise PatchMismatchError("patch mismatch")
        n = self.patch.dim
        zero = PolyScalar.zero(self.patch)
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                s = zero
                for l in range(n):
                    a = self.rows[i][l]
                    b = other.rows[l][j]
                    if a.is_zero() or b.is_zero():
                        continue
                    s = s + a * b
                row.append(s)
            rows.append(row)
        return Endomorphism(self.patch, rows)

    def power(self, n: int) -> "Endomorphism":
        if n < 0:
            raise ValueError("negative power")
        result = Endomorphism.identity(self.patch)
        for _ in range(n):
            result = result.compose(self)
        return result

    def transpose(self) -> "Endomorphism":
        n = self.patch.dim
        return Endomorphism(self.patch,
                            [[self.rows[j][i] for j in range(n)] for i in range(n)])

    def apply(self, x: Multivector) -> Multivector:
        """A X for a vector field X."""
        if x.k != 1:
            raise DegreeError("endomorphism applies to vector fields")
        if x.patch != self.patch:
            raise PatchMismatchError("patch mismatch")
        out: dict[Index, PolyScalar] = {}
        for (j,), xj in x.comps.items():
            for i in range(self.patch.dim):
                a = self.rows[i][j]
                if not a.is_zero():
                    _accumulate(out, (i,), a * xj)
        return Multivector(self.patch, 1, out, _clean=True)

    def apply_form(self, alpha: DiffForm) -> DiffForm:
        """alpha . A, the transpose action on 1-forms."""
        if alpha.k != 1:
            raise DegreeError("transpose action applies to 1-forms")
        if alpha.patch != self.patch:
            raise PatchMismatchError("patch mismatch")
        out: dict[Index, PolyScalar] = {}
        for (i,), ai in alpha.comps.items():
            for j in range(self.patch.dim):
                a = self.rows[i][j]
                if not a.is_zero():
                    _accumulate(out, (j,), ai * a)
        return DiffForm(self.patch, 1, out, _clean=True)

    def conjugate(self) -> "Endomorphism":
        return Endomorphism(self.patch,
                            [[e.conjugate() for e in row] for row in self.rows])

    def eval_at(self, point) -> list[list[GaussRational]]:
        return [[e.eval_at(point) for e in row] for row in self.rows]

    def __str__(self):
        return "[" + "; ".join(", ".join(str(e) for e in row) for row in self.rows) + "]"

    def __repr__(self):
        return f"<Endomorphism {self}>"


def basis_vector(patch: Patch, i: int) -> Multivector:
    return Multivector.basis(patch, i)


def basis_form(patch: Patch, i: int) -> DiffForm:
    return DiffForm.basis(patch, i)


def lie_derivative_endomorphism(x: Multivector, a: Endomorphism) -> Endomorphism:
    """(L_X A)(Y) = [X, A Y] - A [X, Y], assembled column by column."""
    if x.k != 1:
        raise DegreeError("direction must be a vector field")
    if x.patch != a.patch:
        raise PatchMismatchError("patch mismatch")
    patch = a.patch
    cols = []
    for j in range(patch.dim):
        ej = basis_vector(patch, j)
        col = lie_bracket(x, a.apply(ej)) - a.apply(lie_bracket(x, ej))
        cols.append([col.component((i,)) for i in range(patch.dim)])
    return Endomorphism(patch, [[cols[j][i] for j in range(patch.dim)]
                                for i in range(patch.dim)])


# -- concomitants of (pi, A) ---------------------------------------------------

def nijenhuis(a: Endomorphism, x: Multivector, y: Multivector) -> Multivector:
    """Torsion of an endomorphism:
    [AX,AY] - A[X,AY] - A[AX,Y] + A^2 [X,Y]."""
    ax, ay = a.apply(x), a.apply(y)
    return (lie_bracket(ax, ay)
            - a.apply(lie_bracket(x, ay))
            - a.apply(lie_bracket(ax, y))
            + a.apply(a.apply(lie_bracket(x, y))))


def cr_tensor(a: Endomorphism, x: Multivector, y: Multivector) -> Multivector:
    """Obstruction to the i-eigenbundle of A being bracket-closed:
    [AX,AY] + A[AX,A^2 Y] + A[A^2 X,AY] - [A^2 X,A^2 Y]."""
    ax, ay = a.apply(x), a.apply(y)
    a2x, a2y = a.apply(ax), a.apply(ay)
    return (lie_bracket(ax, ay)
            + a.apply(lie_bracket(ax, a2y))
            + a.apply(lie_bracket(a2x, ay))
            - lie_bracket(a2x, a2y))


def schouten_concomitant(pi: Multivector, a: Endomorphism,
                         x: Multivector, alpha: DiffForm) -> Multivector:
    """Compatibility tensor of a bivector and an endomorphism:
    sharp_pi[L_X(alpha . A) - L_{AX} alpha] - (L_{sharp_pi alpha} A)(X)."""
    inner = lie_derivative(x, a.apply_form(alpha)) - lie_derivative(a.apply(x), alpha)
    la = lie_derivative_endomorphism(sharp(pi, alpha), a)
    return sharp(pi, inner) - la.apply(x)


def c_bivector(pi: Multivector, a: Endomorphism,
               alpha: DiffForm, beta: DiffForm) -> DiffForm:
    """The 1-form dual of the (pi, A) compatibility tensor:
    beta . L_{#alpha}A - alpha . L_{#beta}A + d(pi(alpha,beta)) . A - d(pi(alpha.A,beta))."""
    la = lie_derivative_endomorphism(sharp(pi, alpha), a)
    lb = lie_derivative_endomorphism(sharp(pi, beta), a)
    t1 = la.apply_form(beta) - lb.apply_form(alpha)
    t2 = a.apply_form(d_scalar(evaluate(pi, [alpha, beta])))
    t3 = d_scalar(evaluate(pi, [a.apply_form(alpha), beta]))
    return t1 + t2 - t3


def poisson_bracket_1forms(pi: Multivector, alpha: DiffForm, beta: DiffForm) -> DiffForm:
    """{alpha, beta}_pi = L_{#alpha} beta - L_{#beta} alpha - d(pi(alpha, beta))."""
    return (lie_derivative(sharp(pi, alpha), beta)
            - lie_derivative(sharp(pi, beta), alpha)
            - d_scalar(evaluate(pi, [alpha, beta])))
