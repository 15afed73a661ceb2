"""Subset-product relation systems: residuals, candidates, campaigns."""

import numpy as np
import pytest

from brightlab.errors import PreconditionError
from brightlab.lemma_lab import (
    RelationInstance,
    antipodal_falsification,
    antipodal_product_check,
    case2_polynomial,
    enumerate_candidates,
    eigenvalue_relation_audit,
    find_hypothesis_solutions,
    hypothesis_residual,
    infinite_family,
    match_candidates,
    ratio_conclusion_check,
)


def proportional_instance(c: float, y: float, k: int, m: int, n: int) -> RelationInstance:
    """x = c*y with constant y, so every x_I + y_I = (1 + c^|I|) y^|I|."""
    a = 0.5 * (1.0 + c**k) * y**k
    b = 0.5 * (1.0 + c**m) * y**m
    return RelationInstance((c * y,) * n, (y,) * n, a, b, k, m)


class TestHypothesisResidual:
    def test_all_ones_is_exact(self):
        inst = RelationInstance((1.0,) * 4, (1.0,) * 4, 1.0, 1.0, 1, 3)
        assert hypothesis_residual(inst) == (0.0, 0.0)

    def test_proportional_construction_is_exact(self):
        res = hypothesis_residual(proportional_instance(0.8, 1.1, 1, 3, 4))
        assert res.max() < 1e-12

    def test_random_inputs_have_positive_residual(self):
        rng = np.random.default_rng(0)
        inst = RelationInstance(
            tuple(rng.uniform(0.5, 1.5, 4)), tuple(rng.uniform(0.5, 1.5, 4)), 1.0, 1.0, 1, 3
        )
        assert hypothesis_residual(inst).max() > 1e-3

    def test_instance_validation(self):
        with pytest.raises(ValueError):
            RelationInstance((1.0, -0.5), (1.0, 1.0), 1.0, 1.0, 1, 2)
        with pytest.raises(ValueError):
            RelationInstance((1.0, 1.0), (1.0, 0.0), 1.0, 1.0, 1, 2)
        with pytest.raises(ValueError):
            RelationInstance((1.0,) * 4, (1.0,) * 4, 1.0, 1.0, 3, 3)
        with pytest.raises(ValueError):
            RelationInstance((1.0,) * 4, (1.0,) * 4, -1.0, 1.0, 1, 3)


class TestRatioConclusion:
    def test_proportional_instance_passes(self):
        assert ratio_conclusion_check(proportional_instance(0.8, 1.1, 1, 3, 4))

    def test_degenerate_margin_is_refused(self):
        fam = infinite_family(0.3, 4)
        with pytest.raises(PreconditionError) as err:
            ratio_conclusion_check(fam)
        assert "margin" in str(err.value)

    def test_hypothesis_violation_is_refused(self):
        inst = RelationInstance((1.0, 1.2, 1.0, 1.0), (1.0,) * 4, 1.0, 1.0, 1, 3)
        with pytest.raises(PreconditionError):
            ratio_conclusion_check(inst)

    def test_solver_found_instances_satisfy_conclusion(self):
        # randomized search over hypothesis-satisfying instances with a
        # nondegenerate margin never violates the constant-ratio conclusion
        sols = find_hypothesis_solutions(1.0, 1.5, 2, 4, 5, solutions=12, seed=3)
        assert len(sols) >= 4
        for inst in sols:
            assert ratio_conclusion_check(inst, tol=1e-9)


class TestInfiniteFamily:
    def test_residuals_vanish_for_every_subset_size(self):
        fam = infinite_family(0.3, 4)
        for k, m in ((1, 2), (1, 3), (2, 3), (2, 4), (3, 4)):
            inst = RelationInstance(fam.x, fam.y, 1.0, 1.0, k, m)
            assert hypothesis_residual(inst).max() == 0.0

    def test_t_one_is_the_constant_instance(self):
        fam = infinite_family(1.0, 5)
        assert fam.x == (1.0,) * 5
        assert fam.y == (1.0,) * 5

    def test_distinct_parameters_give_distinct_instances(self):
        low = infinite_family(0.5, 4)
        high = infinite_family(1.5, 4)
        assert low.x != high.x
        assert hypothesis_residual(low).max() == 0.0
        assert hypothesis_residual(high).max() == 0.0

    def test_continuum_of_ratios(self):
        # the last-slot ratio x/y = t/(2-t) sweeps through a continuum, so
        # no constancy conclusion is possible without the margin condition
        ratios = {infinite_family(t, 4).x[-1] / infinite_family(t, 4).y[-1] for t in (0.3, 0.7, 1.3)}
        assert len(ratios) == 3

    def test_parameter_range_enforced(self):
        with pytest.raises(ValueError):
            infinite_family(0.0, 4)
        with pytest.raises(ValueError):
            infinite_family(2.0, 4)


class TestEnumerateCandidates:
    def test_quadratic_branch_roots_present(self):
        cset = enumerate_candidates(1.0, 2.0, 1, 3, 4)
        lo, hi = 1.0 - 1.0 / np.sqrt(3.0), 1.0 + 1.0 / np.sqrt(3.0)
        # direct substitution: both roots satisfy z^3 + (2-z)^3 = 4
        for z in (lo, hi):
            assert z**3 + (2.0 - z) ** 3 == pytest.approx(4.0, abs=1e-12)
            assert cset.contains(z, tol=1e-9)

    def test_degenerate_margin_rejected(self):
        with pytest.raises(PreconditionError):
            enumerate_candidates(1.2, 1.2**3, 1, 3, 4)

    def test_only_reduced_top_grade_supported(self):
        with pytest.raises(ValueError):
            enumerate_candidates(1.0, 2.0, 1, 2, 4)

    def test_zero_branch_values_present(self):
        cset = enumerate_candidates(1.0, 2.0, 1, 3, 4)
        # a vanishing x slot forces y = (b/a)^{1/(N-1-k)} = sqrt(2) off-slot
        assert cset.contains(np.sqrt(2.0), tol=1e-9)
        assert cset.contains(2.0, tol=1e-9)

    def test_solver_solutions_land_on_candidates(self):
        cset = enumerate_candidates(1.0, 2.0, 1, 3, 4)
        sols = find_hypothesis_solutions(1.0, 2.0, 1, 3, 4, solutions=30, seed=1)
        assert len(sols) >= 10
        worst = max(match_candidates(inst.y, cset) for inst in sols)
        assert worst < 1e-6

    def test_proportional_branch_for_higher_grade(self):
        # k = 2: constant solutions solve x^2 + y^2 = 2a, x^4 + y^4 = 2b
        cset = enumerate_candidates(1.0, 1.5, 2, 4, 5)
        s = 1.0 + np.sqrt(0.5)
        expected = np.sqrt(s)  # one of the two constant values
        assert cset.contains(expected, tol=1e-9)
        sols = find_hypothesis_solutions(1.0, 1.5, 2, 4, 5, solutions=8, seed=2)
        assert len(sols) >= 2
        for inst in sols:
            assert match_candidates(inst.y, cset) < 1e-6


class TestCase2Polynomial:
    @pytest.mark.parametrize("n,l", [(4, 2), (5, 2), (5, 3), (6, 2), (6, 3), (6, 4)])
    def test_degree_bound_is_attained(self, n, l):
        poly = case2_polynomial(1.0, 2.0, l, n)
        assert len(poly) - 1 == (l - 1) * (2 * (n - l) - 1)
        assert poly[-1] != 0

    def test_parameter_range(self):
        with pytest.raises(ValueError):
            case2_polynomial(1.0, 2.0, 1, 4)
        with pytest.raises(ValueError):
            case2_polynomial(1.0, 2.0, 3, 4)

    def test_roots_produce_hypothesis_solutions(self):
        # every positive root t of the branch polynomial yields a two-value
        # x-vector whose mixed products hit 2b exactly
        from brightlab.lemma_lab import _positive_real_roots

        n, l, a, b = 5, 2, 1.0, 2.0
        for t in _positive_real_roots(case2_polynomial(a, b, l, n)):
            z1 = 2 * a / (1 + t ** (n - l - 1))
            z2 = 2 * a * t ** (l - 1) / (1 + t ** (l - 1))
            x = np.array([z1] * l + [z2] * (n - l))
            y = 2 * a - x
            inst = RelationInstance(tuple(x), tuple(y), a, b, 1, n - 1)
            assert hypothesis_residual(inst).max() < 1e-9


class TestAntipodalProducts:
    def test_constant_vector_passes_exactly(self):
        result = antipodal_product_check((1.3,) * 6, 1.3**2, 2)
        assert result.hypothesis_holds
        assert result.max_equation_residual == 0.0
        assert result.is_constant

    def test_nonconstant_vector_reports_residual(self):
        x = np.array([0.5, 0.8, 1.0, 1.2, 1.5, 2.0])
        gamma = float(np.mean([x[0] * x[1] + x[-1] * x[-2]]) / 2)
        result = antipodal_product_check(x, gamma, 2, tol=1e-10)
        assert not result.hypothesis_holds
        assert result.max_equation_residual > 1e-2
        assert not result.is_constant

    def test_input_validation(self):
        with pytest.raises(ValueError):
            antipodal_product_check((1.0, 2.0, 3.0), 1.0, 2)
        with pytest.raises(ValueError):
            antipodal_product_check((2.0, 1.0, 3.0, 4.0), 1.0, 2)
        with pytest.raises(ValueError):
            antipodal_product_check((1.0, 1.0, 1.0, 1.0), 1.0, 3)
        with pytest.raises(ValueError):
            antipodal_product_check((-1.0, 1.0, 1.0, 1.0), 1.0, 2)

    def test_falsification_finds_no_nonconstant_solution(self):
        report = antipodal_falsification(6, 2, 50000, seed=0)
        assert not report.found_violation
        assert report.best_residual > 1e-6
        assert report.best_x is not None
        assert report.best_x[-1] - report.best_x[0] >= report.min_spread

    def test_falsification_row_retention(self):
        report = antipodal_falsification(6, 2, 1000, seed=1, keep_rows=True)
        assert report.rows is not None
        assert report.rows.shape == (1000, 2)
        assert np.all(report.rows[:, 0] >= 0)


class TestEigenvalueAudit:
    def test_isotropic_profiles_have_zero_defect(self):
        beta = 0.49
        r = np.full(3, np.sqrt(beta))
        audit = eigenvalue_relation_audit(r, r, 2, beta)
        assert audit.max_defect < 1e-15
        assert audit.antitone_ok

    def test_perturbation_scale_is_reported(self):
        beta = 1.0
        r = np.ones(4)
        r_tilde = np.ones(4)
        r_tilde[0] += 1e-3
        audit = eigenvalue_relation_audit(r, r_tilde, 2, beta)
        assert audit.max_defect == pytest.approx(1e-3, rel=1e-6)

    def test_pipeline_integration_with_relative_maps(self):
        from brightlab.body import Ellipsoid, Homothet
        from brightlab.sampling import as_rng, haar_directions
        from brightlab.weingarten import eigen_profile

        base = Ellipsoid(np.diag([1.0, 1.69, 0.64, 1.21]))
        body = Homothet(base, 0.7, (0.1, 0.0, -0.2, 0.0))
        u = haar_directions(4, 1, as_rng(4))[0]
        r = eigen_profile(body, base, u).values
        r_tilde = eigen_profile(body, base, -u).values[::-1]
        audit = eigenvalue_relation_audit(r, r_tilde, 2, 0.49)
        assert audit.max_defect < 1e-7
        assert audit.antitone_ok

    def test_increasing_r_tilde_flags_pairing(self):
        audit = eigenvalue_relation_audit(np.ones(3), np.array([0.5, 1.0, 1.5]), 1, 1.0)
        assert not audit.antitone_ok

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            eigenvalue_relation_audit(np.ones(3), np.ones(4), 1, 1.0)
        with pytest.raises(ValueError):
            eigenvalue_relation_audit(np.ones(3), np.ones(3), 4, 1.0)
