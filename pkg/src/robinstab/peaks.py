"""Locate local maxima of w -> |g(jw)| on [0, inf) and the global peak.

Search strategy: a log-spaced base grid spanning [1e-4, 1e4] times the
largest pole/zero natural frequency, merged with linear windows around the
imaginary parts of the poles (gain peaks cluster there), 4096 points total.
Every bracketed maximum is refined to a frequency error below
1e-9 * max(1, w): golden-section first, then sign bisection of the analytic
gain slope for the digits beyond the comparison noise floor.  w = 0 is
handled as a boundary candidate (a peak iff |g(0)| is not exceeded by its
grid neighbor), and for biproper inputs the w -> inf supremum is a boundary
candidate as well.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .errors import InfiniteNormError
from .lti import RationalTF
from .poly import ON_AXIS_REL_TOL

#: Local peaks below this fraction of the global peak gain are dropped.
DEFAULT_REL_FLOOR = 1e-3

#: Target relative frequency error of a refined peak.
REFINE_REL_TOL = 1e-9

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PeakInfo:
    """One local maximum of |g(jw)| with phase and PCR attached."""

    freq: float
    gain: float
    phase: float
    pcr: float
    is_global: bool = False
    merged: bool = False


@dataclass(frozen=True)
class GridSpec:
    """Search-grid metadata kept for reproducibility."""

    w_min: float
    w_max: float
    n_points: int
    rel_floor: float
    refine_rel_tol: float = REFINE_REL_TOL


@dataclass(frozen=True)
class PeakList:
    peaks: tuple = field(default_factory=tuple)  # sorted by gain, descending
    grid: GridSpec = None

    @property
    def global_peak(self) -> PeakInfo:
        return self.peaks[0]

    @property
    def local_peaks(self):
        return self.peaks[1:]


def _axis_pole_guard(g: RationalTF):
    if not g.is_proper:
        raise InfiniteNormError("L-infinity norm infinite: improper transfer function")
    ps = g.poles()
    if ps.size and np.any(
        np.abs(ps.real) <= ON_AXIS_REL_TOL * np.maximum(1.0, np.abs(ps))
    ):
        raise InfiniteNormError("L-infinity norm infinite: pole on the imaginary axis")


def _search_grid(g: RationalTF, n_points):
    roots = np.concatenate([g.poles(), g.zeros()]) if g.num.degree >= 1 else g.poles()
    mags = np.abs(roots)
    w_ref = float(np.max(mags)) if mags.size and np.max(mags) > 0 else 1.0
    w_lo, w_hi = 1e-4 * w_ref, 1e4 * w_ref
    base = np.geomspace(w_lo, w_hi, n_points // 2)
    pole_freqs = sorted({float(abs(p.imag)) for p in g.poles() if abs(p.imag) > 0})
    extra = []
    if pole_freqs:
        per = max((n_points - base.size) // len(pole_freqs), 8)
        for wf in pole_freqs:
            extra.append(np.linspace(0.6 * wf, 1.4 * wf, per))
            extra.append(np.array([wf]))
    ws = np.unique(np.concatenate([base] + extra)) if extra else base
    ws = ws[ws > 0]
    # near-coincident points (window edges colliding with inserted pole
    # frequencies at 1-ulp distance) would create zero-width brackets and
    # phantom maxima; enforce a minimum relative spacing
    keep = np.empty(ws.size, dtype=bool)
    keep[0] = True
    last = ws[0]
    for i in range(1, ws.size):
        if ws[i] - last > 1e-9 * last:
            keep[i] = True
            last = ws[i]
        else:
            keep[i] = False
    ws = ws[keep]
    return ws, GridSpec(w_lo, w_hi, int(ws.size), DEFAULT_REL_FLOOR)


def _gain(g: RationalTF, w):
    return float(
        _kernels.gain_grid(g.num.coeffs, g.den.coeffs, np.array([w], dtype=float))[0]
    )


def _gain_slope(g: RationalTF, w):
    """d log|g(jw)| / dw, analytically via the logarithmic derivative."""
    s = 1j * w
    val = complex(g.num.derivative()(s)) / complex(g.num(s)) - complex(
        g.den.derivative()(s)
    ) / complex(g.den(s))
    return -val.imag


def _golden_refine(g: RationalTF, a, b):
    """Refine a bracketed maximum of |g(jw)| to REFINE_REL_TOL in w.

    Golden-section comparisons of the gain stall at ~sqrt(machine eps) near
    a smooth maximum, so they only narrow the bracket to 1e-6 relative; the
    last digits come from bisecting the sign of the analytic gain slope,
    which crosses zero cleanly.
    """
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = _gain(g, c)
    fd = _gain(g, d)
    while (b - a) > 1e-6 * max(1.0, a):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = _gain(g, c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = _gain(g, d)
    sa, sb = _gain_slope(g, a), _gain_slope(g, b)
    if sa > 0 > sb:
        while (b - a) > 0.1 * REFINE_REL_TOL * max(1.0, a):
            mid = 0.5 * (a + b)
            if _gain_slope(g, mid) > 0:
                a = mid
            else:
                b = mid
    w = 0.5 * (a + b)
    return w, _gain(g, w)


def local_peaks(g: RationalTF, rel_floor=DEFAULT_REL_FLOOR, n_points=4096) -> PeakList:
    """Every local maximum of |g(jw)| with gain >= rel_floor * global gain.

    Deterministic for a fixed grid; candidates are processed in frequency
    order regardless of evaluation strategy.
    """
    _axis_pole_guard(g)
    ws, grid = _search_grid(g, n_points)
    grid = GridSpec(grid.w_min, grid.w_max, grid.n_points, rel_floor)
    gains = _kernels.gain_grid(g.num.coeffs, g.den.coeffs, ws)

    found = []  # (freq, gain, from_bracket_index)
    for i in range(1, ws.size - 1):
        if gains[i] >= gains[i - 1] and gains[i] >= gains[i + 1] and (
            gains[i] > gains[i - 1] or gains[i] > gains[i + 1]
        ):
            w, gv = _golden_refine(g, ws[i - 1], ws[i + 1])
            found.append((w, gv, i))

    # a refined candidate must actually dominate a small neighborhood;
    # anything else was a bracketing artifact on a monotone stretch
    validated = []
    for w, gv, i in found:
        eps = 1e-6 * max(1.0, w)
        side = float(
            np.max(_kernels.gain_grid(g.num.coeffs, g.den.coeffs, np.array([w - eps, w + eps])))
        )
        if gv * (1.0 + 1e-12) >= side:
            validated.append((w, gv, i))

    # collapse refinements that converged to the same maximum; survivors of a
    # genuine merge (distinct brackets, one extremum) carry the merged flag
    validated.sort()
    collapsed = []
    for w, gv, i in validated:
        if collapsed and abs(w - collapsed[-1][0]) <= 1e-6 * max(1.0, w):
            pw, pg, pi, _ = collapsed[-1]
            collapsed[-1] = (pw, max(pg, gv), pi, i > pi + 1)
        else:
            collapsed.append((w, gv, i, False))

    peaks = []
    for w, gv, _, merged in collapsed:
        theta, pcr = g.phase_and_pcr(w)
        peaks.append(PeakInfo(float(w), float(gv), theta, pcr, merged=merged))

    # DC boundary candidate
    g0 = abs(g.response(0.0))
    if g0 > 0.0 and g0 >= gains[0]:
        theta, pcr = g.phase_and_pcr(0.0)
        peaks.append(PeakInfo(0.0, float(g0), theta, pcr))

    # high-frequency boundary candidate: biproper systems attain their
    # supremum only in the limit w -> inf, where the gain is the leading
    # numerator coefficient (the denominator is monic) and the phase slope
    # of any rational function vanishes
    if g.num.degree == g.den.degree:
        g_inf = abs(g.num.leading)
        if g_inf >= gains[-1]:
            theta_inf = 0.0 if g.num.leading > 0 else np.pi
            peaks.append(PeakInfo(float("inf"), g_inf, theta_inf, 0.0))

    if not peaks:
        # gain monotone decreasing on the grid: supremum at the DC boundary
        theta, pcr = g.phase_and_pcr(0.0)
        peaks.append(PeakInfo(0.0, float(g0), theta, pcr))

    peaks.sort(key=lambda p: (-p.gain, p.freq))
    top_gain = peaks[0].gain
    peaks = [p for p in peaks if p.gain >= rel_floor * top_gain]
    peaks = [
        PeakInfo(p.freq, p.gain, p.phase, p.pcr, is_global=(k == 0), merged=p.merged)
        for k, p in enumerate(peaks)
    ]
    return PeakList(peaks=tuple(peaks), grid=grid)


def linf_norm(g: RationalTF):
    """(peak frequency, peak gain) of |g(jw)| over w >= 0."""
    top = local_peaks(g).global_peak
    return top.freq, top.gain


class PeakAttribution(Enum):
    STABLE_POLE = "StablePolePeak"
    UNSTABLE_POLE = "UnstablePolePeak"
    UNATTRIBUTED = "Unattributed"


def peak_pole_attribution(
    g: RationalTF, peak: PeakInfo, window_rel=0.5
) -> PeakAttribution:
    """Attribute a gain peak to the pole whose |Im| is nearest to its frequency.

    Only poles with | |Im(p)| - w | <= window_rel * max(w, |Im(p)|) qualify;
    with no candidate in the window the peak stays unattributed.  Ties at
    equal distance (e.g. a DC peak flanked by +/-p real poles) resolve to the
    unstable pole, since that is the instability-relevant reading.
    """
    best = None
    best_d = None
    for p in g.poles():
        d = abs(abs(p.imag) - peak.freq)
        if d > window_rel * max(peak.freq, abs(p.imag)):
            continue
        if best_d is None or d < best_d - 1e-12 * max(1.0, peak.freq):
            best, best_d = p, d
        elif abs(d - best_d) <= 1e-12 * max(1.0, peak.freq) and p.real > best.real:
            best = p
    if best is None:
        return PeakAttribution.UNATTRIBUTED
    if best.real > ON_AXIS_REL_TOL * max(1.0, abs(best)):
        return PeakAttribution.UNSTABLE_POLE
    return PeakAttribution.STABLE_POLE
