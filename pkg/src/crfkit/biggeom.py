"""Calculus on the double bundle TM + T*M over a patch.

Sections are (vector field, 1-form) pairs carrying the neutral pairing
metric and the Courant bracket.  The block operator built from an
endomorphism A, a bivector pi and a 2-form sigma acts as

    (X, alpha)  |->  (A X + sharp_pi alpha,  flat_sigma X - alpha . A)

and the machinery here decides, exactly, whether such an operator is
pairing-skew with vanishing cube, and whether its i-eigenbundle is closed
under Courant brackets.
"""

from __future__ import annotations

from fractions import Fraction

from .report import PreconditionError, ReportBuilder, CheckReport
from .scalar import GR_I, GaussRational, Patch, PatchMismatchError, PolyScalar
from .tensor import (DegreeError, DiffForm, Endomorphism, Multivector,
                     exterior_derivative, flat, lie_bracket, lie_derivative,
                     pair, sharp)


class GenSection:
    """A section of TM + T*M: a vector field paired with a 1-form."""

    __slots__ = ("vec", "form")

    def __init__(self, vec: Multivector, form: DiffForm):
        if vec.k != 1 or form.k != 1:
            raise DegreeError("sections pair a vector field with a 1-form")
        if vec.patch != form.patch:
            raise PatchMismatchError("section parts live on different patches")
        object.__setattr__(self, "vec", vec)
        object.__setattr__(self, "form", form)

    def __setattr__(self, name, value):
        raise AttributeError("GenSection is immutable")

    @property
    def patch(self) -> Patch:
        return self.vec.patch

    @staticmethod
    def of_vector(x: Multivector) -> "GenSection":
        return GenSection(x, DiffForm.zero(x.patch, 1))

    @staticmethod
    def of_form(alpha: DiffForm) -> "GenSection":
        return GenSection(Multivector.zero(alpha.patch, 1), alpha)

    @staticmethod
    def zero(patch: Patch) -> "GenSection":
        return GenSection(Multivector.zero(patch, 1), DiffForm.zero(patch, 1))

    def __add__(self, other: "GenSection") -> "GenSection":
        return GenSection(self.vec + other.vec, self.form + other.form)

    def __sub__(self, other: "GenSection") -> "GenSection":
        return GenSection(self.vec - other.vec, self.form - other.form)

    def __neg__(self):
        return GenSection(-self.vec, -self.form)

    def __mul__(self, f):
        return GenSection(self.vec * f, self.form * f)

    __rmul__ = __mul__

    def conjugate(self) -> "GenSection":
        return GenSection(self.vec.conjugate(), self.form.conjugate())

    def is_zero(self) -> bool:
        return self.vec.is_zero() and self.form.is_zero()

    def __eq__(self, other):
        if not isinstance(other, GenSection):
            return NotImplemented
        return self.vec == other.vec and self.form == other.form

    __hash__ = None

    def __str__(self):
        return f"({self.vec}, {self.form})"

    def __repr__(self):
        return f"<GenSection {self}>"


def basis_sections(patch: Patch) -> list[GenSection]:
    """The 2*dim coordinate sections (d/dx_i, 0) and (0, dx_i)."""
    out = [GenSection.of_vector(Multivector.basis(patch, i)) for i in range(patch.dim)]
    out += [GenSection.of_form(DiffForm.basis(patch, i)) for i in range(patch.dim)]
    return out


def pairing(e1: GenSection, e2: GenSection) -> PolyScalar:
    """The neutral metric: half the sum of the two natural pairings."""
    if e1.patch != e2.patch:
        raise PatchMismatchError("sections on different patches")
    return Fraction(1, 2) * (pair(e1.form, e2.vec) + pair(e2.form, e1.vec))


def courant_bracket(e1: GenSection, e2: GenSection) -> GenSection:
    """([X,Y], L_X beta - L_Y alpha + d(alpha(Y) - beta(X))/2)."""
    if e1.patch != e2.patch:
        raise PatchMismatchError("sections on different patches")
    x, alpha = e1.vec, e1.form
    y, beta = e2.vec, e2.form
    vec = lie_bracket(x, y)
    from .tensor import d_scalar
    form = (lie_derivative(x, beta) - lie_derivative(y, alpha)
            + Fraction(1, 2) * d_scalar(pair(alpha, y) - pair(beta, x)))
    return GenSection(vec, form)


class GenEndomorphism:
    """Block operator on TM + T*M stored by its classical blocks (A, pi, sigma).

    Keeping the blocks (never a raw 2m x 2m matrix) makes structural
    constraints such as sigma = 0 visible to checkers.
    """

    __slots__ = ("a", "pi", "sigma")

    def __init__(self, a: Endomorphism, pi: Multivector,
                 sigma: DiffForm | None = None):
        patch = a.patch
        if pi.k != 2 or pi.patch != patch:
            raise DegreeError("pi block must be a bivector on the same patch")
        if sigma is None:
            sigma = DiffForm.zero(patch, 2)
        if sigma.k != 2 or sigma.patch != patch:
            raise DegreeError("sigma block must be a 2-form on the same patch")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "sigma", sigma)

    def __setattr__(self, name, value):
        raise AttributeError("GenEndomorphism is immutable")

    @property
    def patch(self) -> Patch:
        return self.a.patch

    def apply(self, e: GenSection) -> GenSection:
        vec = self.a.apply(e.vec) + sharp(self.pi, e.form)
        form = flat(self.sigma, e.vec) - self.a.apply_form(e.form)
        return GenSection(vec, form)

    def apply_power(self, e: GenSection, n: int) -> GenSection:
        for _ in range(n):
            e = self.apply(e)
        return e

    def conjugate(self) -> "GenEndomorphism":
        return GenEndomorphism(self.a.conjugate(), self.pi.conjugate(),
                               self.sigma.conjugate())


def is_skew_and_f(phi: GenEndomorphism) -> CheckReport:
    """Pairing-skewness and cube-plus-identity vanishing, on basis sections.

    Both conditions are function-linear, so the coordinate basis decides
    them exactly.
    """
    b = ReportBuilder("generalized F structure conditions")
    basis = basis_sections(phi.patch)
    names = _basis_names(phi.patch)
    skew = b.cond("phi:skew", "pairing-skew: g(Phi e1, e2) + g(e1, Phi e2) = 0")
    for i, e1 in enumerate(basis):
        for j in range(i, len(basis)):
            e2 = basis[j]
            val = pairing(phi.apply(e1), e2) + pairing(e1, phi.apply(e2))
            skew.require_zero(val, f"({names[i]}, {names[j]})")
    cube = b.cond("phi:cube", "Phi^3 + Phi = 0 on basis sections")
    for i, e in enumerate(basis):
        val = phi.apply_power(e, 3) + phi.apply(e)
        cube.require_zero(val, names[i])
    return b.report()


def _basis_names(patch: Patch) -> list[str]:
    return [f"(d/d{c}, 0)" for c in patch.coords] + [f"(0, d{c})" for c in patch.coords]


def s_phi(phi: GenEndomorphism, e1: GenSection, e2: GenSection) -> GenSection:
    """Courant-bracket analogue of the eigenbundle-closure tensor:
    [Pe1,Pe2] + P[Pe1,P^2 e2] + P[P^2 e1,Pe2] - [P^2 e1,P^2 e2]."""
    p1, p2 = phi.apply(e1), phi.apply(e2)
    pp1, pp2 = phi.apply(p1), phi.apply(p2)
    return (courant_bracket(p1, p2)
            + phi.apply(courant_bracket(p1, pp2))
            + phi.apply(courant_bracket(pp1, p2))
            - courant_bracket(pp1, pp2))


def s_phi_vanishes_on_basis(phi: GenEndomorphism) -> CheckReport:
    """Decides integrability by direct evaluation on all coordinate basis
    pairs; valid because the tensor is antisymmetric and function-bilinear
    once the cube condition holds (checked first)."""
    b = ReportBuilder("eigenbundle closure via direct tensor evaluation")
    pre = is_skew_and_f(phi)
    b.merge(pre)
    if not pre.passed:
        return b.report()
    basis = basis_sections(phi.patch)
    names = _basis_names(phi.patch)
    cond = b.cond("sphi:basis", "closure tensor vanishes on all basis section pairs")
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            val = s_phi(phi, basis[i], basis[j])
            cond.require_zero(val, f"({names[i]}, {names[j]})")
    return b.report()


class GenProjectors:
    """Spectral projectors of a generalized F operator, as polynomial
    expressions in the operator itself."""

    def __init__(self, phi: GenEndomorphism):
        self.phi = phi

    def pr_e(self, e: GenSection) -> GenSection:
        half = Fraction(1, 2)
        p2 = self.phi.apply_power(e, 2)
        p1 = self.phi.apply(e)
        return -half * (p2 + GR_I * p1)

    def pr_ebar(self, e: GenSection) -> GenSection:
        half = Fraction(1, 2)
        p2 = self.phi.apply_power(e, 2)
        p1 = self.phi.apply(e)
        return -half * (p2 - GR_I * p1)

    def pr_s(self, e: GenSection) -> GenSection:
        return self.phi.apply_power(e, 2) + e


def gen_projectors(phi: GenEndomorphism) -> GenProjectors:
    """Projectors onto the +i, -i and 0 eigenbundles; requires the cube
    condition, reported as a precondition failure otherwise."""
    for e, name in zip(basis_sections(phi.patch), _basis_names(phi.patch)):
        val = phi.apply_power(e, 3) + phi.apply(e)
        if not val.is_zero():
            raise PreconditionError(
                f"operator cube condition fails on {name}", witness=val)
    return GenProjectors(phi)


def eigenbundle_membership(phi: GenEndomorphism, e: GenSection) -> bool:
    """e lies in the +i eigenbundle iff the eigen-projector fixes it."""
    return gen_projectors(phi).pr_e(e) == e


def eigenbundle_section(pi: Multivector, z: Multivector, xi: DiffForm) -> GenSection:
    """The parametrized +i-eigenbundle section (Z - (i/2) sharp_pi xi, xi).

    For A Z = i Z and xi . A = -i xi the eigenvalue equation forces the
    coefficient -i/2 on the correction term (matching the eigen-projector
    membership test exactly).
    """
    return GenSection(z - GaussRational(0, Fraction(1, 2)) * sharp(pi, xi), xi)
