import math

import numpy as np
import pytest

from gaussian_esd.channels import BathSpec, evolve
from gaussian_esd.corpus import random_nonclassical_states, random_symmetric_family
from gaussian_esd.criteria import (
    ALREADY,
    FINITE,
    HORIZON_EXHAUSTED,
    NEVER,
    SymmetricTwoModeState,
    TransitionResult,
    classicality_time,
    esd_time,
    esd_time_symmetric,
    is_separable_two_mode,
    ppt_min_symplectic_eigenvalue,
    squeezed_classicality_bound,
    t_max,
)
from gaussian_esd.errors import BathKindError, DimensionError, DomainError, UnphysicalStateError
from gaussian_esd.phase_space import is_classical, min_eigenvalue

from oracles import symplectic_eigs_bruteforce

LN2 = math.log(2)


def thermal(N, g=1.0):
    return BathSpec.thermal(g, N)


def sym(n, k, ky=None):
    return SymmetricTwoModeState(n, k, k if ky is None else ky)


class TestClassicalityTime:
    def test_already_classical(self):
        res = classicality_time(1.5 * np.eye(4), thermal(1.0))
        assert res.kind == ALREADY and res.t == 0.0

    def test_thermal_ln2(self):
        V0 = sym(2.0, 1.5).covariance()
        closed = classicality_time(V0, thermal(1.0))
        bis = classicality_time(V0, thermal(1.0), method="bisection")
        assert closed.kind == FINITE and closed.method == "closed_form"
        assert closed.t == pytest.approx(LN2, abs=1e-12)
        assert bis.method == "bisection"
        assert bis.t == pytest.approx(LN2, abs=1e-9)

    def test_single_mode_ln2(self):
        assert classicality_time(np.diag([0.5, 2.0]), thermal(1.0)).t == pytest.approx(LN2, abs=1e-12)

    @pytest.mark.parametrize("method", ["auto", "bisection"])
    def test_zero_temperature_never(self, method):
        res = classicality_time(sym(2.0, 1.5).covariance(), thermal(0.0), method=method)
        assert res.kind == NEVER and res.t is None

    def test_squeezed_zero_temperature_never(self):
        bath = BathSpec.squeezed_thermal(1.0, 0.0, 0.5)
        res = classicality_time(sym(2.0, 1.5).covariance(), bath)
        assert res.kind == NEVER
        assert res.bound_time is None

    def test_squeezed_finite_within_bound(self):
        bath = BathSpec.squeezed_thermal(1.0, 1.0, 0.1, 0.3)
        V0 = sym(2.0, 1.5).covariance()
        res = classicality_time(V0, bath)
        assert res.kind == FINITE and res.method == "bisection"
        assert res.bound_time is not None
        assert res.t <= res.bound_time + 1e-9
        assert is_classical(evolve(V0, bath, res.t))
        assert not is_classical(evolve(V0, bath, res.t - 1e-6))

    def test_horizon_exhausted(self):
        bath = BathSpec.squeezed_thermal(1.0, 1.0, 0.1)
        res = classicality_time(sym(2.0, 1.5).covariance(), bath, horizon=0.01)
        assert res.kind == HORIZON_EXHAUSTED

    def test_unphysical(self):
        with pytest.raises(UnphysicalStateError):
            classicality_time(0.5 * np.eye(2), thermal(1.0))

    def test_bad_horizon(self):
        with pytest.raises(DomainError):
            classicality_time(np.diag([0.5, 2.0]), thermal(1.0), horizon=0.0)

    def test_closed_form_needs_thermal(self):
        with pytest.raises(BathKindError):
            classicality_time(np.diag([0.5, 2.0]), BathSpec.squeezed_thermal(1.0, 1.0, 0.1), method="closed_form")

    def test_closed_form_matches_bisection_on_corpus(self):
        for i, V0 in enumerate(random_nonclassical_states(100, 2, seed=101)):
            bath = thermal([0.1, 0.5, 1.0, 2.0][i % 4])
            a = classicality_time(V0, bath)
            b = classicality_time(V0, bath, method="bisection")
            assert abs(a.t - b.t) <= 1e-9

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_n_mode_reduction(self, m):
        for V0 in random_nonclassical_states(10, m, seed=200 + m):
            n0 = min_eigenvalue(V0)
            expected = -math.log(1.0 / (3.0 - 2 * n0))
            assert classicality_time(V0, thermal(1.0), method="bisection").t == pytest.approx(expected, abs=1e-9)

    def test_bounded_by_t_max(self):
        for i, V0 in enumerate(random_nonclassical_states(50, 2, seed=102)):
            N = [0.1, 0.5, 1.0, 2.0][i % 4]
            assert classicality_time(V0, thermal(N)).t <= t_max(1.0, N) + 1e-9

    def test_approaches_t_max(self):
        N = 2.0
        ts = [classicality_time(np.diag([s, 1 / s]), thermal(N)).t for s in (1e-1, 1e-3, 1e-6)]
        assert ts[0] < ts[1] < ts[2] < t_max(1.0, N)
        assert ts[2] == pytest.approx(t_max(1.0, N), abs=1e-5)


class TestTMax:
    def test_values(self):
        assert t_max(1.0, 2.0) == pytest.approx(LN2)
        assert t_max(2.0, 2.0) == pytest.approx(LN2 / 2)
        assert t_max(1.0, 1.0) == pytest.approx(math.log(3))

    def test_zero_temperature(self):
        assert t_max(1.0, 0.0) == math.inf

    def test_domain(self):
        with pytest.raises(DomainError):
            t_max(0.0, 1.0)


class TestSeparability:
    def test_product_vacua(self):
        assert is_separable_two_mode(np.eye(4))

    def test_entangled_family(self):
        V = sym(2.0, 1.5).covariance()
        from gaussian_esd.criteria import partial_transpose

        assert symplectic_eigs_bruteforce(partial_transpose(V))[0] == pytest.approx(0.5, abs=1e-12)
        assert not is_separable_two_mode(V)

    def test_product_thermal(self):
        assert is_separable_two_mode(sym(3.0, 0.0).covariance())

    def test_wrong_mode_count(self):
        with pytest.raises(DimensionError):
            is_separable_two_mode(np.eye(6))

    def test_unphysical(self):
        with pytest.raises(UnphysicalStateError):
            is_separable_two_mode(0.5 * np.eye(4))

    def test_family_equivalence(self):
        disagreements = 0
        for s in random_symmetric_family(1000, seed=303):
            if is_separable_two_mode(s.covariance()) == s.entangled:
                disagreements += 1
        assert disagreements == 0

    def test_ppt_value_on_family(self):
        for s in random_symmetric_family(50, seed=304):
            assert ppt_min_symplectic_eigenvalue(s.covariance()) == pytest.approx(
                math.sqrt(s.ppt_product), abs=1e-10
            )

    def test_classical_implies_separable(self):
        rng_states = random_nonclassical_states(30, 2, seed=305)
        for V0 in rng_states:
            for N in (0.5, 2.0):
                for t in np.linspace(0, 5, 11):
                    V = evolve(V0, thermal(N), t)
                    if is_classical(V):
                        assert is_separable_two_mode(V)


class TestSymmetricFamily:
    def test_flags(self):
        s = sym(2.0, 1.5)
        assert s.bona_fide and s.bona_fide_family and s.entangled

    def test_family_condition_is_weaker_than_uncertainty(self):
        # n^2 - k_max^2 = 1 but (n - k_max)(n + k_min) = (2 - sqrt3) * 2 < 1
        s = SymmetricTwoModeState(2.0, math.sqrt(3.0), 0.0)
        assert s.bona_fide_family
        assert not s.bona_fide
        assert s.family_only


class TestEsdTimeSymmetric:
    def test_thermal_ln2(self):
        res = esd_time_symmetric(sym(2.0, 1.5), thermal(1.0))
        assert res.kind == FINITE and res.t == pytest.approx(LN2, abs=1e-12)
        # n(t) - k(t) = 1.5 - exp(-t) hits 1 at ln 2; cross-check with the general scan
        assert esd_time(sym(2.0, 1.5).covariance(), thermal(1.0)).t == pytest.approx(LN2, abs=1e-9)

    def test_zero_temperature_never(self):
        for s in random_symmetric_family(20, seed=401, equal_k=True):
            if s.entangled:
                assert esd_time_symmetric(s, thermal(0.0)).kind == NEVER

    def test_already_separable(self):
        res = esd_time_symmetric(sym(3.0, 1.0), thermal(1.0))
        assert res.kind == ALREADY and res.t == 0.0

    def test_unphysical(self):
        with pytest.raises(UnphysicalStateError):
            esd_time_symmetric(SymmetricTwoModeState(2.0, math.sqrt(3.0), 0.0), thermal(1.0))

    def test_zero_temperature_entangled_gap(self):
        s = sym(2.0, 1.5)
        for t in np.linspace(0.0, 100.0, 201):
            V = evolve(s.covariance(), thermal(0.0), t)
            gap = V[0, 0] - V[0, 2]
            deficit = (1.0 - (s.n - s.k_x)) * math.exp(-t)
            assert gap == pytest.approx(1.0 - deficit, abs=1e-12)
            assert deficit > 0

    def test_unequal_correlations_can_die_at_zero_temperature(self):
        # (n - k_x)(n - k_y) = 1.2 * 0.82 < 1, but the factor above 1 dominates
        # once both relax towards 1, so the product crosses 1 in finite time
        s = SymmetricTwoModeState(3.0, 1.8, 2.18)
        assert s.bona_fide and s.entangled
        res = esd_time_symmetric(s, thermal(0.0))
        assert res.kind == FINITE
        e = math.exp(-res.t)
        assert (1 + 0.2 * e) * (1 - 0.18 * e) == pytest.approx(1.0, abs=1e-9)


class TestEsdTime:
    def test_bounded_by_classicality_time(self):
        for V0 in random_nonclassical_states(30, 2, seed=501):
            if is_separable_two_mode(V0):
                continue
            for N in (0.1, 1.0):
                e = esd_time(V0, thermal(N))
                c = classicality_time(V0, thermal(N))
                assert e.kind == FINITE
                assert e.t <= c.t + 1e-9

    def test_pure_loss_can_disentangle_noisy_states(self):
        found = False
        for V0 in random_nonclassical_states(40, 2, seed=502):
            if is_separable_two_mode(V0):
                continue
            res = esd_time(V0, thermal(0.0))
            if res.kind == FINITE:
                found = True
                assert ppt_min_symplectic_eigenvalue(evolve(V0, thermal(0.0), res.t)) >= 1 - 1e-9
            else:
                assert res.kind == NEVER
        assert found

    def test_pure_loss_on_pure_two_mode_squeezed_vacuum_never(self):
        r = 0.8
        ch, sh = math.cosh(2 * r), math.sinh(2 * r)
        V0 = SymmetricTwoModeState(ch, sh, sh).covariance()
        assert esd_time(V0, thermal(0.0)).kind == NEVER

    def test_wrong_size(self):
        with pytest.raises(DimensionError):
            esd_time(np.eye(2), thermal(1.0))


class TestSqueezedBound:
    def test_r0_reduces_to_thermal(self):
        bath = BathSpec.squeezed_thermal(1.0, 1.0, 0.0)
        assert squeezed_classicality_bound(0.5, bath) == pytest.approx(-math.log(1.0 / 2.0))

    def test_zero_temperature_has_no_bound(self):
        for r in (0.05, 0.5, 1.0):
            bath = BathSpec.squeezed_thermal(1.0, 0.0, r)
            N = bath.effective_N
            assert abs(bath.M) == pytest.approx(math.sqrt(N * (N + 1)), rel=1e-12)
            assert abs(bath.M) > N / 2
            assert squeezed_classicality_bound(0.5, bath) is None

    def test_finite_bound_is_upper_bound(self):
        bath = BathSpec.squeezed_thermal(1.0, 1.0, 0.1)
        assert abs(bath.M) <= bath.effective_N / 2
        bound = squeezed_classicality_bound(0.5, bath)
        N, M = bath.effective_N, abs(bath.M)
        assert bound == pytest.approx(-math.log((N - 2 * M) / (N + 2 - 2 * M - 1.0)), abs=1e-14)
        for V0 in [np.diag([0.5, 2.0]), sym(2.0, 1.5).covariance()]:
            t_c = classicality_time(V0, bath).t
            assert t_c <= bound + 1e-9

    def test_thermal_bath_rejected(self):
        with pytest.raises(BathKindError):
            squeezed_classicality_bound(0.5, thermal(1.0))

    def test_classical_start_rejected(self):
        with pytest.raises(DomainError):
            squeezed_classicality_bound(1.2, BathSpec.squeezed_thermal(1.0, 1.0, 0.1))


def test_transition_result_json():
    assert TransitionResult(FINITE, 0.5, "bisection", 0.7).to_dict() == {
        "kind": "finite",
        "t": 0.5,
        "method": "bisection",
        "bound_time": 0.7,
    }
