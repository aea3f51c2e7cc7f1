import numpy as np
import pytest

from robinstab import _kernels
from robinstab.errors import InfiniteNormError
from robinstab.lti import RationalTF
from robinstab.models import (
    CyclicSpec,
    MaglevSpec,
    RepressilatorSpec,
    cyclic_network,
    maglev,
    repressilator,
)
from robinstab.peaks import (
    PeakAttribution,
    linf_norm,
    local_peaks,
    peak_pole_attribution,
)

from conftest import oracle_peaks


def _cyclic(m, k=20.0):
    return cyclic_network(CyclicSpec(m=m, k=k))


class TestLinfNorm:
    def test_first_order_peaks_at_dc(self):
        assert linf_norm(RationalTF([1.0], [1.0, 1.0])) == (0.0, 1.0)

    def test_cyclic_m5(self):
        w, gain = linf_norm(_cyclic(5))
        # frozen from the derivative-polynomial critical-point oracle
        assert abs(w - 0.322006739902) < 1e-9 * max(1.0, w)
        assert abs(gain - 1.08960032898) < 1e-8

    def test_repressilator_local_pair(self):
        g = repressilator(RepressilatorSpec(tau=3.482))
        peaks = local_peaks(g).peaks
        assert len(peaks) == 2
        # oracle values; the two gains differ by only 2.5e-6 relative
        assert abs(peaks[0].freq - 0.395943246714) < 1e-8
        assert abs(peaks[0].gain - 1.10268821976) < 1e-8
        assert abs(peaks[1].freq - 1.50091047049) < 1e-8
        assert abs(peaks[1].gain - 1.10268574995) < 1e-8

    def test_axis_pole_rejected(self):
        with pytest.raises(InfiniteNormError):
            linf_norm(RationalTF([1.0], [1.0, 0.0, 1.0]))


class TestLocalPeaks:
    @pytest.mark.parametrize("m,count", [(4, 1), (5, 2), (6, 2), (8, 2), (14, 3), (16, 3), (17, 3)])
    def test_peak_counts(self, m, count):
        assert len(local_peaks(_cyclic(m)).peaks) == count

    @pytest.mark.parametrize("m", [4, 5, 6, 8, 16])
    def test_agrees_with_critical_point_oracle(self, m):
        g = _cyclic(m)
        got = sorted((p.freq, p.gain) for p in local_peaks(g).peaks)
        top_gain = max(gain for _, gain in got)
        want = sorted(
            (w, gain)
            for w, gain, _ in oracle_peaks(g.num.coeffs, g.den.coeffs)
            if gain >= 1e-3 * top_gain
        )
        assert len(got) == len(want)
        for (wg, gg), (wo, go) in zip(got, want):
            assert abs(wg - wo) <= 1e-9 * max(1.0, wo)
            assert abs(gg - go) <= 1e-7 * go

    def test_exactly_one_global(self):
        peaks = local_peaks(_cyclic(16)).peaks
        assert sum(p.is_global for p in peaks) == 1
        assert peaks[0].is_global
        assert peaks[0].gain == max(p.gain for p in peaks)

    def test_gain_recomputable(self):
        g = _cyclic(6)
        for p in local_peaks(g).peaks:
            assert abs(abs(g.response(p.freq)) - p.gain) <= 1e-9 * p.gain

    def test_dc_peak_of_maglev(self):
        g = maglev(MaglevSpec(p=1.0, tau=0.1))
        peaks = local_peaks(g).peaks
        assert len(peaks) == 1
        assert peaks[0].freq == 0.0
        assert abs(peaks[0].gain - 1.0) < 1e-12

    def test_rel_floor_drops_small_peaks(self):
        g = _cyclic(5)
        assert len(local_peaks(g, rel_floor=0.9).peaks) == 1
        assert len(local_peaks(g, rel_floor=1e-3).peaks) == 2

    def test_global_dominates_dense_verification_grid(self):
        for g in (_cyclic(6), _cyclic(16), repressilator(RepressilatorSpec(tau=3.4))):
            _, gain = linf_norm(g)
            ws = np.geomspace(1e-4, 1e4, 1_000_000)
            dense = _kernels.gain_grid(g.num.coeffs, g.den.coeffs, ws)
            assert float(np.max(dense)) <= gain * (1.0 + 1e-7)


class TestAttribution:
    def test_m6_global_stable_local_unstable(self):
        g = _cyclic(6)
        peaks = local_peaks(g).peaks
        assert peak_pole_attribution(g, peaks[0]) is PeakAttribution.STABLE_POLE
        assert peak_pole_attribution(g, peaks[1]) is PeakAttribution.UNSTABLE_POLE

    def test_m8_both_unstable(self):
        g = _cyclic(8)
        for p in local_peaks(g).peaks:
            assert peak_pole_attribution(g, p) is PeakAttribution.UNSTABLE_POLE

    def test_single_peak_single_unstable_pair(self):
        g = _cyclic(1)
        (peak,) = local_peaks(g).peaks
        # nearest-pole oracle: the unstable pair sits closest in |Im|
        poles = g.poles()
        nearest = min(poles, key=lambda p: abs(abs(p.imag) - peak.freq))
        assert nearest.real > 0
        assert peak_pole_attribution(g, peak) is PeakAttribution.UNSTABLE_POLE

    def test_unattributed_when_no_pole_near(self):
        g = _cyclic(1)
        (peak,) = local_peaks(g).peaks
        assert (
            peak_pole_attribution(g, peak, window_rel=1e-6)
            is PeakAttribution.UNATTRIBUTED
        )
