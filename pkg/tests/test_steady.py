import math

import numpy as np
import pytest

from bsmeta.model import (
    NoSolutionError,
    ProblemSpec,
    UnsupportedModelError,
    alpha_bar,
    builtin_model,
    custom_model,
)
from bsmeta.steady import (
    BranchKind,
    GLUE_TOL,
    ShootOutcome,
    boundary_slope_scaling,
    epsilon_sweep,
    length_map,
    shoot,
    solve_n_zero,
    solve_negative,
    solve_one_zero,
    solve_positive,
)

GAUSS = builtin_model("gauss")


def spec_at(eps, h="gauss", n=800, ell=1.0):
    return ProblemSpec(epsilon=eps, ell=ell, model=builtin_model(h), n_cells=n)


class TestShoot:
    def test_escape_above_critical_slope(self):
        res = shoot(1.0, spec_at(0.06))
        assert res.outcome is ShootOutcome.MONOTONE_ESCAPE

    def test_return_below_critical_slope(self):
        res = shoot(0.5, spec_at(0.06))
        assert res.outcome is ShootOutcome.RETURN_AT
        assert res.L is not None and 0 < res.L < 1.0
        # trajectory positive inside and ~0 at the return point
        assert np.all(res.trajectory.values[1:-1] > 0)
        assert abs(res.trajectory.values[-1]) < 1e-8

    def test_small_alpha_linearized_length(self):
        # as alpha -> 0 the return length tends to pi*sqrt(eps*h(0)/f''(0))
        res = shoot(0.01, spec_at(0.06))
        assert res.L == pytest.approx(math.pi * math.sqrt(0.06), rel=2e-2)

    def test_step_halving_fourth_order(self):
        # below step ~2e-3 the error saturates at the event-refinement
        # tolerance, so the order fit uses coarser steps
        spec = spec_at(0.06)
        steps = [1.6e-2 / 2 ** k for k in range(4)]
        ref = shoot(0.5, spec, step=1e-5).L
        errs = [abs(shoot(0.5, spec, step=s).L - ref) for s in steps]
        slope = np.polyfit(np.log(steps), np.log(errs), 1)[0]
        assert slope >= 3.5


class TestLengthMap:
    def test_monotone_sweep(self):
        res = length_map(np.linspace(0.1, 0.8, 8), spec_at(0.06))
        assert len(res.points) == 8
        assert res.monotone
        ls = [L for _, L in res.points]
        assert all(b > a for a, b in zip(ls, ls[1:]))

    def test_requires_sorted_interior_alphas(self):
        spec = spec_at(0.06)
        with pytest.raises(ValueError):
            length_map([0.5, 0.4], spec)
        with pytest.raises(ValueError):
            length_map([0.5, alpha_bar(0.06, GAUSS) + 0.1], spec)

    def test_constant_diffusion_phase_plane_oracle(self):
        # phase plane for h == 1: eps*p*dp/du = f'(u)*(p - 1) with p = u'.
        # Integrate in u away from the turning point, then switch to p as
        # the independent variable through p = 0 and down to the return.
        from scipy.integrate import solve_ivp

        eps, alpha = 0.08, 0.6
        p_switch = 0.1 * alpha

        def upstroke(u, y):  # y = [p, x]
            p = y[0]
            return [u * (p - 1.0) / (eps * p), 1.0 / p]

        def reach_switch(u, y):
            return y[0] - p_switch

        reach_switch.terminal = True
        s1 = solve_ivp(upstroke, (0.0, 2.0), [alpha, 0.0],
                       events=reach_switch, rtol=1e-11, atol=1e-13)
        u_sw = s1.t_events[0][0]
        _, x_sw = s1.y_events[0][0]

        def downstroke(p, y):  # y = [u, x]
            u = y[0]
            return [eps * p / (u * (p - 1.0)), eps / (u * (p - 1.0))]

        def returned(p, y):
            return y[0] - 1e-6

        returned.terminal = True
        s2 = solve_ivp(downstroke, (p_switch, -60.0), [u_sw, x_sw],
                       events=returned, rtol=1e-11, atol=1e-13)
        p_end = s2.t_events[0][0]
        u_end, x_end = s2.y_events[0][0]
        # linear tail below the small-u cutoff
        L_oracle = x_end + u_end / abs(p_end)

        res = shoot(alpha, spec_at(eps, h="const"))
        assert res.L == pytest.approx(L_oracle, rel=1e-6)


class TestPositiveBranch:
    @pytest.mark.parametrize("eps", [0.01, 0.03, 0.06])
    def test_invariants(self, eps):
        spec = spec_at(eps)
        st = solve_positive(spec)
        u = st.u.values
        x = spec.x
        assert st.kind is BranchKind.POSITIVE
        assert np.all(u[1:-1] > 0)
        assert np.all(u <= x + 1e-6)
        assert np.all(st.u.central_derivative() <= 1.0 + 1e-6)
        assert np.max(np.diff(u, 2)) <= 1e-6
        assert abs(u[0]) <= 1e-12 and abs(u[-1]) <= 1e-10

    def test_alpha_star_matches_profile_slope(self):
        spec = spec_at(0.06)
        st = solve_positive(spec)
        dx = spec.dx
        one_sided = (-3 * st.u.values[0] + 4 * st.u.values[1]
                     - st.u.values[2]) / (2 * dx)
        assert one_sided == pytest.approx(st.alpha_star, abs=5e-5)

    def test_sine_subsolution_below(self):
        spec = spec_at(0.06)
        st = solve_positive(spec)
        v2 = 0.05 * np.sin(np.pi * spec.x)
        assert np.all(st.u.values >= v2 - 1e-9)

    def test_above_threshold_rejected(self):
        with pytest.raises(NoSolutionError):
            solve_positive(spec_at(0.5))

    def test_small_epsilon_backward_regime(self):
        # deep boundary-layer regime where forward shooting is ill-conditioned
        st = solve_positive(spec_at(0.008))
        u = st.u.values
        x = spec_at(0.008).x
        assert np.all(u[1:-1] > 0)
        assert np.all(u <= x + 1e-6)
        assert st.boundary_slopes[1] < -10


class TestNegativeBranch:
    def test_reflection_identity(self):
        spec = spec_at(0.03)
        pos = solve_positive(spec)
        neg = solve_negative(spec)
        assert np.max(np.abs(neg.u.values + pos.u.values[::-1])) <= 1e-10
        assert neg.u.values[spec.n_cells // 2] == pytest.approx(
            -pos.u.values[spec.n_cells // 2], abs=1e-10)

    @pytest.mark.parametrize("eps", [0.01, 0.03, 0.06])
    def test_invariants(self, eps):
        spec = spec_at(eps)
        st = solve_negative(spec)
        u = st.u.values
        x = spec.x
        assert np.all(u[1:-1] < 0)
        assert np.all(u >= x - spec.ell - 1e-6)
        assert np.min(np.diff(u, 2)) >= -1e-6  # convex
        assert np.all(st.u.central_derivative() <= 1.0 + 1e-6)

    def test_non_even_h_rejected(self):
        skew = custom_model(lambda v: np.exp(-(v ** 2)) * (1 - 0.1 * v),
                            lambda v: v ** 2 / 2)
        spec = ProblemSpec(epsilon=0.06, ell=1.0, model=skew, n_cells=800)
        with pytest.raises(UnsupportedModelError):
            solve_negative(spec)


class TestOneZeroBranches:
    @pytest.mark.parametrize("eps", [0.01, 0.02])
    def test_minus_invariants(self, eps):
        spec = spec_at(eps)
        st = solve_one_zero("minus", spec)
        u = st.u.values
        x = spec.x
        mid = spec.n_cells // 2
        assert st.kind is BranchKind.ONE_ZERO_MINUS
        assert abs(u[mid]) <= 1e-6
        left, right = slice(1, mid), slice(mid + 1, -1)
        assert np.all(u[left] < 0) and np.all(u[left] > x[left] - 0.5 - 1e-9)
        assert np.all(u[right] > 0) and np.all(u[right] < x[right] - 0.5 + 1e-9)

    @pytest.mark.parametrize("sign", ["plus", "minus"])
    def test_odd_about_midpoint(self, sign):
        spec = spec_at(0.01)
        st = solve_one_zero(sign, spec)
        u = st.u.values
        assert np.max(np.abs(u + u[::-1])) <= 1e-10

    def test_plus_invariants(self):
        # the plus state carries its layers at the interior zero and is
        # pinched between the full-domain lines x and x - ell
        spec = spec_at(0.01)
        st = solve_one_zero("plus", spec)
        u = st.u.values
        x = spec.x
        mid = spec.n_cells // 2
        assert st.kind is BranchKind.ONE_ZERO_PLUS
        assert abs(u[mid]) <= 1e-6
        left, right = slice(1, mid), slice(mid + 1, -1)
        assert np.all(u[left] > 0) and np.all(u[left] < x[left] + 1e-9)
        assert np.all(u[right] < 0) and np.all(u[right] > x[right] - 1.0 - 1e-9)

    def test_glue_slope_mismatch_bounded(self):
        spec = spec_at(0.01)
        st = solve_one_zero("minus", spec)
        mid = spec.n_cells // 2
        dx = spec.dx
        u = st.u.values
        sl = (3 * u[mid] - 4 * u[mid - 1] + u[mid - 2]) / (2 * dx)
        sr = (-3 * u[mid] + 4 * u[mid + 1] - u[mid + 2]) / (2 * dx)
        assert abs(sl - sr) <= GLUE_TOL

    def test_half_length_threshold(self):
        # threshold for the one-zero branch is a quarter of the full one
        with pytest.raises(NoSolutionError):
            solve_one_zero("minus", spec_at(0.09))

    def test_nonexistence_between_thresholds(self):
        # below the a-priori bound but with the shortest return length
        # pi*sqrt(eps) > ell/2 already: no one-zero state, clean error
        with pytest.raises(NoSolutionError, match="return length exceeds"):
            solve_one_zero("minus", spec_at(0.04))


class TestNZero:
    def test_consistency_with_simpler_branches(self):
        spec = spec_at(0.01)
        z0 = solve_n_zero(0, spec, first_sign="plus")
        assert np.max(np.abs(z0.u.values - solve_positive(spec).u.values)) <= 1e-12
        z1 = solve_n_zero(1, spec, first_sign="minus")
        assert np.max(np.abs(z1.u.values
                             - solve_one_zero("minus", spec).u.values)) <= 1e-12

    def test_two_zero_state(self):
        spec = spec_at(0.002, n=900)
        st = solve_n_zero(2, spec, first_sign="minus")
        u = st.u.values
        assert st.n_zeros == 2
        i1, i2 = spec.n_cells // 3, 2 * spec.n_cells // 3
        assert abs(u[i1]) <= 1e-6 and abs(u[i2]) <= 1e-6
        assert np.all(u[1:i1] < 0) and np.all(u[i1 + 1:i2] > 0)
        assert np.all(u[i2 + 1:-1] < 0)

    def test_threshold_scales_with_partition(self):
        with pytest.raises(NoSolutionError):
            solve_n_zero(2, spec_at(0.02, n=900))


class TestEpsilonFamilies:
    def test_positive_family_ordering(self):
        states = epsilon_sweep([0.01, 0.03, 0.06], BranchKind.POSITIVE,
                               spec_at(0.06))
        for small, large in zip(states, states[1:]):
            assert np.min(small.u.values - large.u.values) >= -1e-8

    def test_negative_family_ordering(self):
        states = epsilon_sweep([0.01, 0.03, 0.06], BranchKind.NEGATIVE,
                               spec_at(0.06))
        for small, large in zip(states, states[1:]):
            assert np.min(large.u.values - small.u.values) >= -1e-8

    def test_one_zero_family_limit(self):
        spec = spec_at(0.06)
        x = spec.x
        mask = (x >= 0.1) & (x <= 0.9)
        dists = []
        for eps in (0.02, 0.01, 0.005):
            st = solve_one_zero("minus", spec.with_(epsilon=eps))
            dists.append(np.max(np.abs(st.u.values[mask] - (x[mask] - 0.5))))
        assert dists[0] > dists[1] > dists[2]

    def test_derivative_jump_ordering_for_unequal_halves(self):
        # shorter arc meets the joint with the smaller slope
        a_short = solve_positive(spec_at(0.01, ell=0.4)).alpha_star
        a_long = solve_positive(spec_at(0.01, ell=0.6)).alpha_star
        assert a_short < a_long


class TestBoundarySlopes:
    def test_scaling_window(self):
        pairs = boundary_slope_scaling([0.05, 0.025, 0.0125], spec_at(0.06))
        prods = [p for _, p in pairs]
        assert all(p < 0 for p in prods)
        mags = [abs(p) for p in prods]
        assert max(mags) / min(mags) <= 2.0

    def test_slope_roughly_doubles(self):
        pairs = boundary_slope_scaling([0.05, 0.025, 0.0125], spec_at(0.06))
        slopes = [p / e for e, p in pairs]
        for s1, s2 in zip(slopes, slopes[1:]):
            assert 1.5 <= s2 / s1 <= 2.5
