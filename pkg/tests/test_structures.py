import random

import pytest

from crfkit.biggeom import GenEndomorphism, s_phi_vanishes_on_basis
from crfkit.fuzz import fuzz_corpus, random_poly
from crfkit.instancefile import parse_instance
from crfkit.library import load_builtin
from crfkit.report import PreconditionError
from crfkit.scalar import GaussRational, Patch, PolyScalar, parse_poly
from crfkit.structures import (AdaptedFrame, StructureInstance,
                               check_almost_contact, check_classical_crf,
                               check_contact_poisson, check_cr_type,
                               check_f_structure, check_frame_crf,
                               check_integrability, check_integrability_alt,
                               check_involutive, check_local_form,
                               check_nonholonomic_poisson_submanifold,
                               check_normal_classical,
                               check_normal_contact_poisson, check_normality,
                               check_projectable, check_prop33,
                               check_quasi_classical, contact_product,
                               product_instance, projectors)
from crfkit.tensor import (DiffForm, Endomorphism, Multivector, basis_form,
                           basis_vector, exterior_derivative, lie_bracket,
                           lie_derivative, lie_derivative_endomorphism, pair,
                           sharp)

from helpers import random_multivector


def rename(inst: StructureInstance, names) -> StructureInstance:
    """Same tensors on a patch with fresh coordinate names (for products)."""
    import dataclasses
    patch = Patch(tuple(names))
    assert patch.dim == inst.patch.dim

    def move_poly(f):
        return PolyScalar(patch, dict(f.terms), _clean=True)

    def move_mv(w, cls):
        return cls(patch, w.k, {i: move_poly(c) for i, c in w.comps.items()}, _clean=True)

    a = None
    if inst.a is not None:
        a = Endomorphism(patch, [[move_poly(inst.a.entry(i, j))
                                  for j in range(patch.dim)]
                                 for i in range(patch.dim)])
    pi = move_mv(inst.bivector(), Multivector)
    contact = [(move_mv(z, Multivector), move_mv(xi, DiffForm))
               for z, xi in inst.contact]
    return StructureInstance(patch=patch, a=a, pi=pi, contact=contact,
                             name=inst.name + "-renamed")


class TestProjectors:
    def test_complex_structure_halves(self):
        p = Patch(("x", "y"))
        a = Endomorphism.from_strings(p, [["0", "-1"], ["1", "0"]])
        pr = projectors(a)
        half = GaussRational(0, 1)
        out = pr.pr_h.apply(Multivector.basis(p, 0))
        expected = Multivector(p, 1, {
            (0,): PolyScalar.const(p, GaussRational(1, 0)) * GaussRational(1) * PolyScalar.const(p, 1),
        })
        # pr_H(d/dx) = (d/dx - i d/dy)/2
        want = Multivector(p, 1, {
            (0,): PolyScalar.const(p, GaussRational(1) / 2),
            (1,): PolyScalar.const(p, GaussRational(0, -1) / 2)})
        assert out == want

    def test_zero_endomorphism(self):
        p = Patch(("x", "y", "z"))
        pr = projectors(Endomorphism.zero(p))
        assert pr.pr_q == Endomorphism.identity(p)
        assert pr.pr_p.is_zero()

    def test_sum_relations(self):
        inst = load_builtin("locally-product-r5")
        pr = projectors(inst.a)
        assert pr.pr_h + pr.pr_hbar == pr.pr_p
        ident = Endomorphism.identity(inst.patch)
        assert pr.pr_p + pr.pr_q == ident
        for m in (pr.pr_h, pr.pr_hbar, pr.pr_q, pr.pr_p):
            assert m.compose(m) == m

    def test_non_f_rejected(self):
        p = Patch(("x", "y"))
        with pytest.raises(PreconditionError):
            projectors(Endomorphism.identity(p))


class TestFStructure:
    def test_block_pass(self):
        p = Patch(("x", "y", "z"))
        a = Endomorphism.from_strings(p, [["0", "-1", "0"], ["1", "0", "0"],
                                          ["0", "0", "0"]])
        assert check_f_structure(a).passed

    def test_identity_fails_with_witness(self):
        p = Patch(("x", "y"))
        rep = check_f_structure(Endomorphism.identity(p))
        assert not rep.passed
        w = rep.condition("f:cube").witnesses[0]
        assert str(w.value) == "2"


class TestCrAndCrf:
    def test_constant_structures_pass(self):
        for name in ("complex-r2", "holomorphic-poisson-r4", "zero-pi-r3"):
            inst = load_builtin(name)
            assert check_cr_type(inst.a).passed
            assert check_classical_crf(inst.a).passed

    def test_rank_two_image_always_cr(self):
        # one-dimensional +i eigenbundle is bracket-closed for free
        inst = load_builtin("nonnormal-contact-r3")
        assert check_cr_type(inst.a).passed

    def test_reeb_dependent_block_fails_crf(self):
        inst = load_builtin("nonnormal-contact-r3")
        rep = check_classical_crf(inst.a)
        assert not rep.passed
        assert rep.failed_ids() == ["crf:(b)"]
        for w in rep.condition("crf:(b)").witnesses:
            assert not w.value.is_zero()

    def test_perturbed_off_block_entry_fails_cr(self):
        # degree-5 image: an off-block polynomial entry breaks eigenbundle closure
        p = Patch(("x1", "y1", "x2", "y2", "t"))
        rows = [["0", "-1", "0", "0", "0"],
                ["1", "0", "0", "0", "0"],
                ["0", "0", "0", "-1", "0"],
                ["0", "0", "1", "0", "0"],
                ["0", "0", "0", "0", "0"]]
        a = Endomorphism.from_strings(p, rows)
        # gauge by S = Id + N with one polynomial nilpotent entry keeps A^3+A=0
        n = [["0"] * 5 for _ in range(5)]
        n[0][2] = "y1"
        nm = Endomorphism.from_strings(p, n)
        ident = Endomorphism.identity(p)
        a2 = (ident + nm).compose(a).compose(ident - nm)
        assert check_f_structure(a2).passed
        rep = check_cr_type(a2)
        assert not rep.passed
        for w in rep.condition("cr:S_A").witnesses:
            assert not w.value.is_zero()

    def test_sasakian_normal_implies_crf(self):
        inst = load_builtin("sasakian-r3")
        assert check_classical_crf(inst.a).passed

    def test_normal_contact_implies_crf_on_nxn(self):
        inst = load_builtin("nxnprime-r7")
        assert check_classical_crf(inst.a).passed


class TestQuasiClassical:
    def test_builtin_pairs(self):
        for name in ("holomorphic-poisson-r4", "locally-product-r5",
                     "perturbed-holomorphic-r6", "cosymplectic-r5"):
            inst = load_builtin(name)
            assert check_quasi_classical(inst.a, inst.bivector()).passed

    def test_zero_bivector_any_f(self):
        inst = load_builtin("zero-pi-r3")
        rep = check_quasi_classical(inst.a, Multivector.zero(inst.patch, 2))
        assert rep.passed

    def test_mixed_component_fails(self):
        # pi with both eigenbundle legs of different type cannot be compatible
        inst = load_builtin("holomorphic-poisson-r4")
        p = inst.patch
        mixed = Multivector(p, 2, {(0, 1): PolyScalar.const(p, 1)})
        quasi = check_quasi_classical(inst.a, mixed)
        if quasi.passed:
            assert not check_local_form(inst.a, mixed).passed
        else:
            assert not quasi.passed

    def test_local_form_of_builtins(self):
        for name in ("holomorphic-poisson-r4", "locally-product-r5"):
            inst = load_builtin(name)
            rep = check_local_form(inst.a, inst.bivector())
            assert rep.passed
            assert inst.bivector().is_real()

    def test_kernel_leg_fails_local_form(self):
        inst = load_builtin("locally-product-r5")
        p = inst.patch
        bad = inst.bivector() + Multivector(p, 2, {(0, 4): PolyScalar.const(p, 1)})
        rep = check_quasi_classical(inst.a, bad)
        if rep.passed:
            local = check_local_form(inst.a, bad)
            assert not local.condition("localform:Qleg").passed
        else:
            assert not rep.passed

    def test_projector_coherence(self):
        # sharp image lies inside the image distribution, as an operator identity
        for name in ("holomorphic-poisson-r4", "locally-product-r5",
                     "cosymplectic-r5", "nxnprime-r7"):
            inst = load_builtin(name)
            pr = projectors(inst.a)
            pi = inst.bivector()
            for j in range(inst.patch.dim):
                v = sharp(pi, basis_form(inst.patch, j))
                assert pr.pr_p.apply(v) == v


class TestIntegrability:
    def test_holomorphic_instance_passes(self):
        inst = load_builtin("holomorphic-poisson-r4")
        assert check_integrability(inst.a, inst.bivector()).passed

    def test_locally_product_passes(self):
        inst = load_builtin("locally-product-r5")
        assert check_integrability(inst.a, inst.bivector()).passed

    def test_antiholomorphic_coefficient_fails_condition_three(self):
        inst = load_builtin("perturbed-holomorphic-r6")
        rep = check_integrability(inst.a, inst.bivector())
        assert rep.failed_ids() == ["thm2.1:(3)"]
        alt = check_integrability_alt(inst.a, inst.bivector())
        assert alt.failed_ids() == ["prop2.4:(3b)"]

    def test_master_equivalence_sample(self):
        names = ("trivial", "complex-r2", "holomorphic-poisson-r4",
                 "locally-product-r5", "perturbed-holomorphic-r6",
                 "cosymplectic-r5", "sasakian-r3", "nonnormal-contact-r3")
        insts = [load_builtin(n) for n in names] + fuzz_corpus(7, 6)
        for inst in insts:
            r1 = check_integrability(inst.a, inst.bivector())
            r2 = check_integrability_alt(inst.a, inst.bivector())
            r3 = s_phi_vanishes_on_basis(inst.phi())
            assert r1.passed == r2.passed == r3.passed, inst.name

    def test_remark22_equivalent_forms(self):
        # three formulations of the Hamiltonian-preservation condition agree
        names = ("holomorphic-poisson-r4", "locally-product-r5",
                 "perturbed-holomorphic-r6", "cosymplectic-r5")
        for name in names:
            inst = load_builtin(name)
            a, pi = inst.a, inst.bivector()
            patch = inst.patch
            pr = projectors(a)
            a2 = a.compose(a)
            form_a = form_b = form_c = True
            for j in range(patch.dim):
                beta = -1 * a.apply_form(a.apply_form(basis_form(patch, j)))
                if beta.is_zero():
                    continue
                ham = sharp(pi, beta)
                for i in range(patch.dim):
                    x = pr.pr_p.apply(basis_vector(patch, i))
                    if x.is_zero():
                        continue
                    if not pr.pr_q.apply(lie_bracket(ham, x)).is_zero():
                        form_a = False
                    ld = lie_derivative_endomorphism(ham, a2)
                    if not ld.apply(x).is_zero():
                        form_b = False
                    for l in range(patch.dim):
                        lam = pr.pr_q.apply_form(basis_form(patch, l))
                        if lam.is_zero():
                            continue
                        dl = exterior_derivative(lam)
                        from crfkit.tensor import evaluate
                        if not evaluate(dl, [ham, x]).is_zero():
                            form_c = False
                        if not pair(lie_derivative(ham, lam), x).is_zero():
                            form_c = False
            assert form_a == form_b == form_c, name

    def test_witness_soundness(self):
        for inst in (load_builtin("perturbed-holomorphic-r6"),
                     load_builtin("nonnormal-contact-r3")):
            rep = check_integrability(inst.a, inst.bivector())
            assert not rep.passed
            for w in rep.witnesses():
                assert not w.value.is_zero()


class TestProducts:
    def test_product_of_passing_instances_passes(self):
        a = load_builtin("holomorphic-poisson-r4")
        b = rename(load_builtin("complex-r2"), ("u", "v"))
        prod = product_instance(a, b)
        assert check_integrability(prod.a, prod.bivector()).passed

    def test_product_with_trivial_factor(self):
        a = load_builtin("holomorphic-poisson-r4")
        t = rename(load_builtin("trivial"), ("u1", "u2", "u3"))
        prod = product_instance(a, t)
        assert check_integrability(prod.a, prod.bivector()).passed

    def test_pass_times_fail_fails(self):
        a = load_builtin("holomorphic-poisson-r4")
        bad = rename(load_builtin("perturbed-holomorphic-r6"),
                     ("u1", "v1", "u2", "v2", "u3", "v3"))
        prod = product_instance(a, bad)
        rep = check_integrability(prod.a, prod.bivector())
        assert not rep.passed
        for w in rep.witnesses():
            assert not w.value.is_zero()

    def test_name_collision_rejected(self):
        a = load_builtin("holomorphic-poisson-r4")
        with pytest.raises(ValueError):
            product_instance(a, load_builtin("holomorphic-poisson-r4"))


class TestFoliations:
    def test_example41_distribution_not_involutive(self):
        inst = load_builtin("example41-r5")
        rep = check_involutive(inst.p_proj)
        assert not rep.passed
        values = [str(w.value) for w in rep.condition("inv:closed").witnesses]
        assert values == ["-2*d/dx3"]

    def test_coordinate_span_involutive(self):
        p = Patch(("x", "y", "z"))
        d = Endomorphism.from_strings(p, [["1", "0", "0"], ["0", "1", "0"],
                                          ["0", "0", "0"]])
        assert check_involutive(d).passed

    def test_non_idempotent_rejected(self):
        p = Patch(("x", "y"))
        with pytest.raises(PreconditionError):
            check_involutive(Endomorphism.from_strings(p, [["1", "1"], ["0", "1"]]))

    def test_projectability_depends_on_transverse_coordinates(self):
        p = Patch(("y1", "y2", "x1"))
        pr_q = Endomorphism.from_strings(p, [["0", "0", "0"], ["0", "0", "0"],
                                             ["0", "0", "1"]])
        good = Multivector(p, 2, {(0, 1): parse_poly("y1^2 + y2", p)})
        assert check_projectable(good, pr_q).passed
        bad = Multivector(p, 2, {(0, 1): parse_poly("x1*y1", p)})
        rep = check_projectable(bad, pr_q)
        assert not rep.passed
        assert rep.failed_ids() == ["proj:transverse"]

    def test_submanifold_conditions_example41(self):
        inst = load_builtin("example41-r5")
        rep = check_nonholonomic_poisson_submanifold(inst.bivector(), inst.p_proj)
        assert rep.passed
        assert rep.condition("def4.1:(1)").passed
        assert rep.condition("def4.1:(2)").passed
        assert not rep.condition("def4.1:involutive").passed

    def test_full_tangent_distribution(self):
        inst = load_builtin("symplectic-r2")
        ident = Endomorphism.identity(inst.patch)
        rep = check_nonholonomic_poisson_submanifold(inst.bivector(), ident)
        assert rep.passed
        assert rep.condition("def4.1:involutive").passed

    def test_too_small_distribution_fails_first_condition(self):
        inst = load_builtin("symplectic-r2")
        p = inst.patch
        proj = Endomorphism.from_strings(p, [["1", "0"], ["0", "0"]])
        rep = check_nonholonomic_poisson_submanifold(inst.bivector(), proj)
        assert not rep.condition("def4.1:(1)").passed

    def test_hamiltonian_preservation_function_multiples(self):
        # stability of condition two under polynomial rescaling of both slots
        inst = load_builtin("example41-r5")
        p = inst.patch
        pi = inst.bivector()
        rng = random.Random(71)
        comp = Endomorphism.identity(p) - inst.p_proj
        for _ in range(6):
            f = random_poly(rng, p, deg=2, terms=2, real=True)
            alpha = f * basis_form(p, rng.randrange(p.dim))
            x = inst.p_proj.apply(random_multivector(rng, p, 1, real=True))
            val = comp.apply(lie_bracket(sharp(pi, alpha), x))
            assert val.is_zero()


def cosymplectic_pair():
    inst = load_builtin("cosymplectic-r5")
    other = rename(inst, ("u1", "v1", "u2", "v2", "s"))
    return inst, other


class TestContact:
    def test_almost_contact_builtins(self):
        for name in ("cosymplectic-r5", "sasakian-r3", "nonnormal-contact-r3",
                     "nxnprime-r7"):
            assert check_almost_contact(load_builtin(name)).passed

    def test_normality_verdicts(self):
        assert check_normality(load_builtin("cosymplectic-r5")).passed
        assert check_normality(load_builtin("sasakian-r3")).passed
        rep = check_normality(load_builtin("nonnormal-contact-r3"))
        assert not rep.passed

    def test_classical_normality_pi_zero(self):
        inst = load_builtin("sasakian-r3")
        assert check_normal_classical(inst).passed
        bad = load_builtin("nonnormal-contact-r3")
        rep = check_normal_classical(bad)
        assert not rep.passed
        for w in rep.condition("eq35:NijZ").witnesses:
            assert not w.value.is_zero()

    def test_contact_poisson_builtins(self):
        assert check_contact_poisson(load_builtin("cosymplectic-r5")).passed
        assert check_contact_poisson(load_builtin("nxnprime-r7")).passed

    def test_zero_bivector_contact_poisson(self):
        inst = load_builtin("sasakian-r3")
        assert check_contact_poisson(inst).passed
        assert check_normal_contact_poisson(inst).passed

    def test_normal_contact_poisson_nxn(self):
        assert check_normal_contact_poisson(load_builtin("nxnprime-r7")).passed

    def test_prop33_full_normality(self):
        for name in ("cosymplectic-r5", "sasakian-r3", "nxnprime-r7"):
            rep = check_prop33(load_builtin(name))
            assert rep.passed, (name, rep.failed_ids())

    def test_missing_contact_data(self):
        with pytest.raises(PreconditionError):
            check_almost_contact(load_builtin("holomorphic-poisson-r4"))


class TestContactProduct:
    def test_two_cosymplectic_copies(self):
        a, b = cosymplectic_pair()
        prod, rep = contact_product(a, b)
        assert rep.passed, rep.failed_ids()
        assert check_f_structure(prod.a).passed
        # J squares to minus identity
        sq = prod.a.compose(prod.a) + Endomorphism.identity(prod.patch)
        assert sq.is_zero()

    def test_zero_bivector_factors(self):
        a = load_builtin("sasakian-r3")
        b = rename(a, ("u", "v", "w"))
        prod, rep = contact_product(a, b)
        assert rep.passed
        assert prod.bivector().is_zero()

    def test_non_normal_factor_breaks_torsion(self):
        a = load_builtin("cosymplectic-r5")
        bad = rename(load_builtin("nonnormal-contact-r3"), ("u", "v", "w"))
        # oracle: the factor itself fails the normality checker
        assert not check_normality(load_builtin("nonnormal-contact-r3")).passed
        prod, rep = contact_product(a, bad)
        nij = rep.condition("prod:NijJ")
        assert not nij.passed
        for w in nij.witnesses:
            assert not w.value.is_zero()

    def test_integrability_iff_both_factors_normal(self):
        normal = [load_builtin("cosymplectic-r5"), load_builtin("sasakian-r3")]
        renames = [("u1", "v1", "u2", "v2", "s"), ("u", "v", "w")]
        bad = load_builtin("nonnormal-contact-r3")
        for first in normal:
            for second, names in zip(normal + [bad],
                                     renames + [("p", "q", "r")]):
                sec = rename(second, names)
                _, rep = contact_product(first, sec)
                both_normal = check_normality(first).passed \
                    and check_normality(second).passed
                assert rep.condition("prod:NijJ").passed == both_normal


class TestFrames:
    def test_validation_passes_on_builtins(self):
        for name in ("holomorphic-poisson-r4", "locally-product-r5",
                     "sasakian-r3", "nonnormal-contact-r3", "nxnprime-r7"):
            inst = load_builtin(name)
            rep = inst.frames.validate(inst.a, inst.point())
            assert rep.passed, (name, rep.failed_ids())

    def test_bad_eigen_frame_caught(self):
        inst = load_builtin("holomorphic-poisson-r4")
        p = inst.patch
        bad = AdaptedFrame(h=[Multivector.basis(p, 0)], q=[],
                           kappa=[DiffForm.basis(p, 0)])
        rep = bad.validate(inst.a, inst.point())
        assert not rep.condition("frame:eigen").passed

    def test_frame_route_agrees_with_projector_route(self):
        for name in ("holomorphic-poisson-r4", "locally-product-r5",
                     "sasakian-r3", "nonnormal-contact-r3", "nxnprime-r7"):
            inst = load_builtin(name)
            frame_rep = check_frame_crf(inst)
            proj_rep = check_classical_crf(inst.a)
            assert frame_rep.passed == proj_rep.passed, name

    def test_dual_cobasis_requires_unit_determinant(self):
        p = Patch(("x", "y", "z"))
        h = [Multivector(p, 1, {(0,): parse_poly("x", p)})]
        frame = AdaptedFrame(h=h, q=[Multivector.basis(p, 2)],
                             kappa=[DiffForm.basis(p, 0)])
        with pytest.raises(PreconditionError):
            frame.dual_cobasis()


class TestSPhiRouteOnContact:
    def test_contact_instances_integrable_iff_sphi_vanishes(self):
        for name in ("cosymplectic-r5", "sasakian-r3", "nonnormal-contact-r3"):
            inst = load_builtin(name)
            r1 = check_integrability(inst.a, inst.bivector())
            r3 = s_phi_vanishes_on_basis(inst.phi())
            assert r1.passed == r3.passed
