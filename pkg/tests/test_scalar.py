import random

import pytest

from crfkit.scalar import (GR_I, GR_ONE, GaussRational, ParseError, Patch,
                           PatchMismatchError, PolyScalar, parse_poly)

from helpers import random_poly

XY = Patch(("x", "y"))


def poly(s: str, patch=XY) -> PolyScalar:
    return parse_poly(s, patch)


class TestPatch:
    def test_duplicate_names_rejected(self):
        with pytest.raises(ValueError):
            Patch(("x", "x"))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            Patch(())

    def test_index(self):
        assert XY.index("y") == 1
        with pytest.raises(KeyError):
            XY.index("z")


class TestGaussRational:
    def test_canonical_fractions(self):
        from fractions import Fraction
        c = GaussRational(Fraction(2, 4), Fraction(-3, -6))
        assert c.re == Fraction(1, 2) and c.im == Fraction(1, 2)

    def test_field_ops(self):
        a = GaussRational(1, 2)
        b = GaussRational(3, -1)
        assert a * b == GaussRational(5, 5)
        assert (a / b) * b == a
        assert a.conjugate().conjugate() == a

    def test_i_squared(self):
        assert GR_I * GR_I == GaussRational(-1)


class TestRingOps:
    def test_add_cancel(self):
        assert poly("x+1") + poly("x-1") == poly("2*x")

    def test_conjugate_product(self):
        assert poly("x+i*y") * poly("x-i*y") == poly("x^2+y^2")

    def test_zero_annihilates(self):
        p = poly("x^2*y - 3/2")
        z = PolyScalar.zero(XY)
        assert (z * p).is_zero()
        assert (z * p).terms == {}

    def test_patch_mismatch(self):
        other = Patch(("u", "v"))
        with pytest.raises(PatchMismatchError):
            poly("x") + parse_poly("u", other)

    def test_degree_adds_on_product(self):
        rng = random.Random(1)
        for _ in range(25):
            a = random_poly(rng, XY)
            b = random_poly(rng, XY)
            if a.is_zero() or b.is_zero():
                continue
            assert (a * b).total_degree() == a.total_degree() + b.total_degree()

    def test_ring_axioms(self):
        rng = random.Random(2)
        for _ in range(30):
            a, b, c = (random_poly(rng, XY) for _ in range(3))
            assert (a + b) * c == a * c + b * c
            assert (a * b) * c == a * (b * c)
            assert a * b == b * a
            assert a + b == b + a

    def test_pow(self):
        assert poly("x+1") ** 3 == poly("x^3 + 3*x^2 + 3*x + 1")
        assert poly("x") ** 0 == poly("1")
        with pytest.raises(ValueError):
            poly("x") ** -1


class TestPartial:
    def test_basic(self):
        assert poly("x^2*y").partial(0) == poly("2*x*y")
        assert poly("x^2").partial(1).is_zero()
        assert poly("i*x").partial(0) == poly("i")

    def test_degree_drops(self):
        p = poly("x^3*y + x")
        assert p.partial(0).total_degree() == p.total_degree() - 1

    def test_leibniz(self):
        rng = random.Random(3)
        for _ in range(25):
            a = random_poly(rng, XY)
            b = random_poly(rng, XY)
            for i in range(2):
                assert (a * b).partial(i) == a.partial(i) * b + a * b.partial(i)

    def test_index_range(self):
        with pytest.raises(IndexError):
            poly("x").partial(2)


class TestConjugate:
    def test_basic(self):
        assert poly("i*x").conjugate() == poly("-i*x")
        assert poly("x+1").conjugate() == poly("x+1")

    def test_involution_and_automorphism(self):
        rng = random.Random(4)
        for _ in range(25):
            a = random_poly(rng, XY)
            b = random_poly(rng, XY)
            assert a.conjugate().conjugate() == a
            assert (a * b).conjugate() == a.conjugate() * b.conjugate()
            assert (a + b).conjugate() == a.conjugate() + b.conjugate()


class TestParseFormat:
    def test_two_term_map(self):
        from fractions import Fraction
        p = poly("x^2*y - 3/2")
        assert p.terms == {(2, 1): GR_ONE, (0, 0): GaussRational(Fraction(-3, 2))}

    def test_distributes_i(self):
        assert poly("i*(x+y)").terms == {(1, 0): GR_I, (0, 1): GR_I}

    def test_unknown_name_positioned(self):
        with pytest.raises(ParseError) as e:
            poly("x + z^2")
        assert e.value.pos == 4

    def test_syntax_error_positioned(self):
        with pytest.raises(ParseError):
            poly("x + * y")
        with pytest.raises(ParseError):
            poly("x ^ y")
        with pytest.raises(ParseError):
            poly("(x")

    def test_roundtrip(self):
        rng = random.Random(5)
        for _ in range(40):
            p = random_poly(rng, XY, deg=3, terms=4)
            assert parse_poly(str(p), XY) == p

    def test_zero_prints_and_parses(self):
        z = PolyScalar.zero(XY)
        assert str(z) == "0"
        assert parse_poly("0", XY) == z

    def test_eval_at(self):
        from fractions import Fraction
        p = poly("x^2*y - 3/2")
        assert p.eval_at((Fraction(2), Fraction(1, 2))) == GaussRational(Fraction(1, 2))
