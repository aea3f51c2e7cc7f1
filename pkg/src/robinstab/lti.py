"""Rational transfer functions: algebra, frequency response, phase and PCR.

The phase change rate (PCR) of g at frequency w is the derivative of
arg g(jw) with respect to w.  It is computed analytically from the
logarithmic derivative,

    PCR(w) = Re[ (num'/num - den'/den)(jw) ],

never by finite differencing: downstream instability-radius verdicts hinge
on strict inequalities close to equality, where differencing noise is
unacceptable.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AnalysisError, PoleOnAxisError
from .poly import ON_AXIS_REL_TOL, Polynomial

log = logging.getLogger(__name__)

#: Two gains within this relative distance are considered tied; a tied
#: global peak demotes the class shape to NEITHER.
GAIN_TIE_REL_TOL = 1e-6


class RationalTF:
    """Proper or improper real-rational transfer function num/den.

    Canonical form scales the denominator monic.  No pole-zero cancellation
    ever happens implicitly; use :meth:`normalize` to cancel explicitly.
    Values are immutable apart from the lazy pole/zero caches, whose
    population is idempotent, so concurrent use is safe.
    """

    __slots__ = ("num", "den", "_poles", "_zeros")

    def __init__(self, num, den):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = den if isinstance(den, Polynomial) else Polynomial(den)
        if den.is_zero:
            raise ValueError("denominator must not be the zero polynomial")
        lead = den.leading
        self.num = Polynomial(num.coeffs / lead)
        self.den = Polynomial(den.coeffs / lead)
        self._poles = None
        self._zeros = None

    @property
    def is_proper(self):
        return self.num.degree <= self.den.degree

    @property
    def is_strictly_proper(self):
        return self.num.degree < self.den.degree

    def poles(self):
        if self._poles is None:
            self._poles = self.den.roots() if self.den.degree >= 1 else np.empty(0, complex)
        return self._poles

    def zeros(self):
        if self._zeros is None:
            self._zeros = self.num.roots() if self.num.degree >= 1 else np.empty(0, complex)
        return self._zeros

    def __mul__(self, other):
        if np.isscalar(other):
            return RationalTF(self.num * float(other), self.den)
        return RationalTF(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __add__(self, other):
        if np.isscalar(other):
            other = RationalTF([float(other)], [1.0])
        return RationalTF(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalTF(-self.num, self.den)

    def __eq__(self, other):
        if not isinstance(other, RationalTF):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalTF(num={self.num.coeffs.tolist()}, den={self.den.coeffs.tolist()})"

    def response(self, omega):
        """g(jw); raises PoleOnAxisError when jw sits on a pole."""
        s = 1j * float(omega)
        if self.den.degree >= 1 and self._near(self.poles(), s):
            raise PoleOnAxisError(f"pole on evaluation frequency w={omega!r}")
        return complex(self.num(s)) / complex(self.den(s))

    def phase_and_pcr(self, omega):
        """(arg g(jw) in (-pi, pi], d arg g / dw) computed analytically."""
        s = 1j * float(omega)
        if self.den.degree >= 1 and self._near(self.poles(), s):
            raise PoleOnAxisError(f"pole at evaluation frequency w={omega!r}")
        if self.num.is_zero or (self.num.degree >= 1 and self._near(self.zeros(), s)):
            raise AnalysisError(f"zero at evaluation frequency w={omega!r}")
        nv = complex(self.num(s))
        dv = complex(self.den(s))
        theta = float(np.angle(nv / dv))
        dn = complex(self.num.derivative()(s))
        dd = complex(self.den.derivative()(s))
        pcr = (dn / nv - dd / dv).real
        return theta, float(pcr)

    def unstable_poles(self):
        """(count, poles) with Re > on-axis tolerance, multiplicity included.

        Raises PoleOnAxisError when a pole sits inside the axis band, since
        unstable-pole counting is then ill-defined.
        """
        ps = self.poles()
        scale = np.maximum(1.0, np.abs(ps)) if ps.size else np.empty(0)
        if ps.size and np.any(np.abs(ps.real) <= ON_AXIS_REL_TOL * scale):
            raise PoleOnAxisError("marginal pole; class-G membership undefined")
        sel = ps[ps.real > 0] if ps.size else ps
        return int(sel.size), sel

    def normalize(self, rel_tol=1e-8):
        """Cancel common num/den roots within rel_tol; logs every cancellation.

        Returns (normalized_tf, cancelled_roots).  Near-cancellations are a
        modelling smell, hence the logging: hidden unstable modes change
        internal-stability conclusions.
        """
        if self.num.is_zero or self.num.degree < 1 or self.den.degree < 1:
            return self, []
        zs = list(self.zeros())
        ps = list(self.poles())
        cancelled = []
        kept_z = []
        for z in zs:
            hit = None
            for i, p in enumerate(ps):
                if abs(z - p) <= rel_tol * max(1.0, abs(z)):
                    hit = i
                    break
            if hit is None:
                kept_z.append(z)
            else:
                cancelled.append(ps.pop(hit))
        if not cancelled:
            return self, []
        for r in cancelled:
            log.warning("cancelling common factor at s=%s", r)
        num = Polynomial.from_roots(kept_z, leading=self.num.leading)
        den = Polynomial.from_roots(ps, leading=self.den.leading)
        return RationalTF(num, den), cancelled

    @staticmethod
    def _near(points, s, rel_tol=ON_AXIS_REL_TOL):
        return bool(np.any(np.abs(points - s) <= rel_tol * np.maximum(1.0, np.abs(s))))


def positive_feedback(loop: RationalTF) -> RationalTF:
    """Close the positive feedback loop: loop / (1 - loop)."""
    den = loop.den - loop.num
    if den.is_zero:
        raise ValueError("loop is identically unity; feedback undefined")
    return RationalTF(loop.num, den)


def pip_check(g: RationalTF) -> bool:
    """Parity interlacing property.

    True iff every open interval between consecutive real CRHP zeros of g
    (the zero at +infinity counts, as g is strictly proper) contains an even
    number of real ORHP poles, multiplicity included.  Necessary and
    sufficient for stabilizability by a stable controller.
    """
    if not g.is_strictly_proper:
        raise ValueError("PIP check requires a strictly proper system")
    real_zeros = []
    if not g.num.is_zero and g.num.degree >= 1:
        for z in g.zeros():
            if abs(z.imag) <= 1e-9 * (1.0 + abs(z)) and z.real >= -ON_AXIS_REL_TOL * (
                1.0 + abs(z)
            ):
                real_zeros.append(max(z.real, 0.0))
    real_zeros = sorted(set(round(z, 12) for z in real_zeros))
    real_zeros.append(float("inf"))
    if len(real_zeros) < 2:
        return True
    real_unstable_poles = [
        p.real
        for p in g.poles()
        if abs(p.imag) <= 1e-9 * (1.0 + abs(p))
        and p.real > ON_AXIS_REL_TOL * (1.0 + abs(p))
    ]
    for lo, hi in zip(real_zeros[:-1], real_zeros[1:]):
        count = sum(1 for p in real_unstable_poles if lo < p < hi)
        if count % 2 == 1:
            return False
    return True


class PeakShape(Enum):
    PEAK_AT_ZERO = "PeakAtZero"
    PEAK_AT_NONZERO = "PeakAtNonzero"
    NEITHER = "Neither"


@dataclass(frozen=True)
class ClassTag:
    """Membership data for the unstable-system classes used by the verdicts.

    ``shape`` records where the unique global gain peak sits: at DC, at a
    nonzero frequency, or NEITHER when the top two peaks tie within
    GAIN_TIE_REL_TOL (uniqueness is then numerically undecidable).
    """

    n_unstable: int
    pip_ok: bool
    shape: PeakShape
    peak_freq: float
    note: str = ""


def classify(g: RationalTF, peaks) -> ClassTag:
    """Build the ClassTag for g from an already-computed PeakList."""
    n_unstable, _ = g.unstable_poles()
    pip_ok = pip_check(g)
    plist = peaks.peaks
    if not plist:
        raise AnalysisError("no gain peaks found; cannot classify")
    top = plist[0]
    if len(plist) > 1:
        runner = plist[1]
        if abs(top.gain - runner.gain) <= GAIN_TIE_REL_TOL * top.gain:
            return ClassTag(
                n_unstable,
                pip_ok,
                PeakShape.NEITHER,
                top.freq,
                note=(
                    f"global peak tie within {GAIN_TIE_REL_TOL:g} relative: "
                    f"{top.gain!r} at w={top.freq!r} vs {runner.gain!r} at w={runner.freq!r}"
                ),
            )
    shape = PeakShape.PEAK_AT_ZERO if top.freq == 0.0 else PeakShape.PEAK_AT_NONZERO
    return ClassTag(n_unstable, pip_ok, shape, top.freq)
