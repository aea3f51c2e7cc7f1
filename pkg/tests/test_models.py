import logging
import math

import numpy as np
import pytest

from robinstab.lti import PeakShape, RationalTF, classify, positive_feedback
from robinstab.models import (
    ControllerVariant,
    CyclicSpec,
    MaglevSpec,
    MaglevVariant,
    RepressilatorSpec,
    cyclic_network,
    maglev,
    maglev_compensator,
    maglev_epsilon_controller,
    pade_delay,
    repressilator,
    repressilator_perturbation,
)
from robinstab.allpass import AllPassForm, AllPassPerturbation
from robinstab.peaks import linf_norm, local_peaks
from robinstab.poly import Polynomial, StabilityKind, routh_hurwitz
from robinstab.rir import RirStatus, rir_verdict


class TestCyclicNetwork:
    def test_construction_paths_agree_up_to_m20(self):
        for m in range(1, 21):
            spec = CyclicSpec(m=m, k=20.0)
            direct = cyclic_network(spec)
            ring = Polynomial([1.0, 1.0])
            power = Polynomial([1.0])
            for _ in range(2 * m + 1):
                power = power * ring
            loop = positive_feedback(RationalTF([-20.0], power))
            assert direct.den.allclose(loop.den, rtol=1e-12)
            assert direct.num.allclose(loop.num, rtol=1e-12)

    def test_m1_has_two_unstable_poles(self):
        assert cyclic_network(CyclicSpec(m=1, k=20.0)).unstable_poles()[0] == 2

    def test_bad_specs_rejected(self):
        with pytest.raises(ValueError):
            CyclicSpec(m=0)
        with pytest.raises(ValueError):
            CyclicSpec(m=3, k=-1.0)


class TestPadeDelay:
    def test_first_order_closed_form(self):
        # (1 - s/2)/(1 + s/2), compared DC-normalized since the stored
        # denominator is monic
        d = pade_delay(1.0, order=1)
        assert np.allclose(d.num.coeffs / d.num.coeffs[0], [1.0, -0.5], rtol=1e-15)
        assert np.allclose(d.den.coeffs / d.den.coeffs[0], [1.0, 0.5], rtol=1e-15)

    def test_incremental_matches_factorial_formula(self):
        for order in range(1, 8):
            d = pade_delay(1.0, order)
            n = order
            expected = np.array(
                [
                    math.factorial(2 * n - k)
                    * math.factorial(n)
                    / (
                        math.factorial(2 * n)
                        * math.factorial(k)
                        * math.factorial(n - k)
                    )
                    for k in range(n + 1)
                ]
            )
            got = d.den.coeffs / d.den.coeffs[0]
            assert np.allclose(got, expected / expected[0], rtol=1e-14)

    @pytest.mark.parametrize("tau", [0.1, 1.0, 10.0])
    @pytest.mark.parametrize("order", [1, 2, 3, 4, 5, 6, 7])
    def test_allpass_property(self, tau, order):
        d = pade_delay(tau, order)
        ws = np.geomspace(1e-2 / tau, 1e2 / tau, 1000)
        for w in ws:
            assert abs(abs(d.response(w)) - 1.0) <= 1e-12

    def test_unit_dc_gain(self):
        assert pade_delay(2.5, 5).response(0.0) == 1.0

    def test_order5_phase_accuracy(self):
        d = pade_delay(1.0, 5)
        for w in np.linspace(0.01, 0.5, 60):
            phase = np.angle(d.response(w))
            assert abs(phase - (-w)) <= 1e-8 * w

    def test_bad_args(self):
        with pytest.raises(ValueError):
            pade_delay(0.0, 5)
        with pytest.raises(ValueError):
            pade_delay(1.0, 0)


class TestRepressilator:
    def test_zero_delay_is_plain_feedback(self):
        spec = RepressilatorSpec(tau=0.0)
        g = repressilator(spec)
        assert g.den.degree == 3
        assert g.unstable_poles()[0] == 2

    def test_delay_raises_denominator_degree(self):
        g = repressilator(RepressilatorSpec(tau=1.0))
        assert g.den.degree == 8

    def test_stable_nominal_loop_warns(self, caplog):
        with caplog.at_level(logging.WARNING, logger="robinstab.models"):
            repressilator(RepressilatorSpec(tau=0.0, k=0.1))
        assert any("not exponentially unstable" in r.message for r in caplog.records)

    def test_perturbation_dc_gain_is_zero(self):
        base = AllPassPerturbation(1.0 / 1.1044, AllPassForm.LAG, a=18.4747)
        for eps in (-0.05, 0.0, 0.05):
            delta = repressilator_perturbation(base, eps)
            assert delta.response(0.0) == 0.0

    def test_perturbation_magnitude_scaling(self):
        base = AllPassPerturbation(0.5, AllPassForm.LAG, a=2.0)
        delta = repressilator_perturbation(base, 0.1, cutoff=0.01)
        w = 50.0  # far above the cutoff the high-pass is transparent
        assert abs(abs(delta.response(w)) - 0.5 * 1.1) < 1e-4

    def test_exact_radius_across_delay_range(self):
        for tau in (0.0, 1.0, 3.0, 3.481):
            v = rir_verdict(repressilator(RepressilatorSpec(tau=tau)))
            assert v.status is RirStatus.EXACT, tau

    def test_marginal_base_at_tau_3p4(self):
        # frozen oracle values: gain 1.10438842127 at w=0.40134510241,
        # all-pass parameter 18.47425171 (here the peak is well resolved,
        # so the construction is reproducible to many digits)
        g = repressilator(RepressilatorSpec(tau=3.4))
        v = rir_verdict(g)
        assert v.status is RirStatus.EXACT
        delta = v.certificate.delta
        assert delta.form is AllPassForm.LAG
        assert abs(delta.a - 18.47425171) < 1e-6 * 18.47425171
        assert abs(delta.gain - 1.0 / 1.10438842127) < 1e-9


class TestMaglev:
    def test_full_model_dc_pcr(self):
        g = maglev(MaglevSpec(p=1.0, tau=0.1, k=1.0))
        _, pcr = g.phase_and_pcr(0.0)
        assert abs(pcr - (-0.1)) < 1e-12

    def test_reduced_model_dc_pcr(self):
        g = maglev(MaglevSpec(p=1.0, tau=0.1), MaglevVariant.REDUCED_SECOND_ORDER)
        _, pcr = g.phase_and_pcr(0.0)
        assert abs(pcr) < 1e-12

    def test_full_model_violates_necessary_condition(self):
        v = rir_verdict(maglev(MaglevSpec(p=1.0, tau=0.1, k=1.0)))
        assert v.status is RirStatus.NECESSARY_VIOLATED
        assert v.lower_strict
        assert abs(v.lower - 1.0) < 1e-9  # p^2/k

    def test_poorly_separated_timescales_warn(self, caplog):
        with caplog.at_level(logging.WARNING, logger="robinstab.models"):
            MaglevSpec(p=5.0, tau=1.0)
        assert any("not well separated" in r.message for r in caplog.records)


class TestCompensator:
    def test_auto_time_constant(self):
        spec = MaglevSpec(p=1.0, tau=0.1)
        f = maglev_compensator(spec)
        assert np.allclose(f.den.coeffs / f.den.coeffs[0], [1.0, 10.0], rtol=1e-15)
        assert np.allclose(f.num.coeffs / f.num.coeffs[0], [1.0, 10.1], rtol=1e-15)

    def test_dc_pcr_vanishes_for_any_tau_c(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            spec = MaglevSpec(
                p=float(rng.uniform(0.3, 3.0)),
                tau=float(rng.uniform(0.01, 0.3) / rng.uniform(1.0, 3.0)),
            )
            tau_c = float(rng.uniform(0.1, 20.0))
            g_c = maglev(spec) * maglev_compensator(spec, tau_c)
            _, pcr = g_c.phase_and_pcr(0.0)
            assert abs(pcr) < 1e-9

    def test_boundary_time_constant_keeps_dc_peak(self):
        spec = MaglevSpec(p=1.0, tau=0.1)
        g_c = maglev(spec) * maglev_compensator(spec)
        tag = classify(g_c, local_peaks(g_c))
        assert tag.shape is PeakShape.PEAK_AT_ZERO
        assert tag.n_unstable == 1

    def test_above_boundary_loses_dc_peak(self):
        spec = MaglevSpec(p=1.0, tau=0.1)
        g_c = maglev(spec) * maglev_compensator(spec, 1.1 / (spec.p**2 * spec.tau))
        tag = classify(g_c, local_peaks(g_c))
        assert tag.shape is not PeakShape.PEAK_AT_ZERO


class TestEpsilonController:
    def test_closed_loop_quintic_coefficients(self):
        # monic characteristic polynomial of the compensated loop must be
        # s^5 + (q+1)d s^4 + q d^2 s^3 + k e d s^2 + k e (p^2+e^2 d) s + k e^3 p^2
        rng = np.random.default_rng(31)
        for _ in range(20):
            spec = MaglevSpec(
                p=float(rng.uniform(0.5, 2.0)),
                tau=float(rng.uniform(0.02, 0.2)),
                k=float(rng.uniform(0.5, 4.0)),
            )
            eps = float(rng.uniform(1e-5, 1e-2))
            q = float(rng.uniform(10.0, 1e4))
            g_c = maglev(spec) * maglev_compensator(spec)
            c_eps = maglev_epsilon_controller(spec, eps, q)
            char = g_c.den * c_eps.den - g_c.num * c_eps.num
            monic = Polynomial(char.coeffs / char.leading)
            d = 1.0 / spec.tau + spec.p**2 * spec.tau
            dh = spec.p**2
            k = spec.k
            expected = Polynomial(
                [
                    k * eps**3 * dh,
                    k * eps * (dh + eps**2 * d),
                    k * eps * d,
                    q * d * d,
                    (q + 1) * d,
                    1.0,
                ]
            )
            assert monic.allclose(expected, rtol=1e-9)

    def test_stabilizes_for_small_eps(self):
        # eps large enough that the k*eps^3 constant term survives the
        # cancellation in den*den - num*num (at eps ~ 1e-5 it sits ~1e-19
        # relative to the other coefficients, below double precision)
        spec = MaglevSpec(p=1.0, tau=0.1, k=1.0)
        g_c = maglev(spec) * maglev_compensator(spec)
        c_eps = maglev_epsilon_controller(spec, 1e-2, 5.0)
        char = g_c.den * c_eps.den - g_c.num * c_eps.num
        monic = Polynomial(char.coeffs / char.leading)
        assert routh_hurwitz(monic).kind is StabilityKind.STABLE
        assert max(r.real for r in monic.roots()) < 0

    def test_norm_approaches_flat_gain(self):
        spec = MaglevSpec(p=1.0, tau=0.1, k=1.0)
        c_eps = maglev_epsilon_controller(spec, 1e-6, 1e3)
        _, norm = linf_norm(c_eps)
        assert abs(norm - 1.0) <= 1e-4

    def test_composite_norm_ratio_bound(self):
        spec = MaglevSpec(p=1.0, tau=0.1, k=1.0)
        f = maglev_compensator(spec)
        c_eps = maglev_epsilon_controller(spec, 1e-6, 1e3)
        _, norm = linf_norm(f * c_eps)
        target = spec.p**2 * (1.0 + spec.p**2 * spec.tau**2) / spec.k
        assert abs(norm - target) <= 1e-3 * target

    def test_reduced_variant_pole_placement(self):
        spec = MaglevSpec(p=1.0, tau=0.1, k=2.0)
        c = maglev_epsilon_controller(spec, 1e-3, 50.0, ControllerVariant.FOR_REDUCED)
        assert c.den.allclose(Polynomial([50.0, 1.0]), rtol=1e-15)
        assert all(r.real < 0 for r in c.poles())
