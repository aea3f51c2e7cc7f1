"""Maximal-PCR all-pass synthesis.

Among stable real-rational functions whose gain peak sits at w_p with a
prescribed phase theta_p there, the largest achievable phase change rate is

    sup theta'(w_p) = -|sin(theta_p)| / w_p        (w_p > 0),

attained by a first-order all-pass, (a-s)/(a+s) for theta_p in (-pi, 0) and
(s-a)/(s+a) for theta_p in (0, pi), or by the constants +/-1 when theta_p is
0 or pi.  At w_p = 0 only theta_p in {0, pi} is feasible and the supremum
is 0.  The parameter a comes out in closed form from the tangent half-angle
inversion; nothing here iterates.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InfeasiblePhaseError
from .lti import RationalTF

#: Phases within this absolute distance of 0 or pi select the zeroth-order
#: forms; beyond it the first-order parameter is computed in closed form.
ZERO_PHASE_TOL = 1e-12

_TWO_PI = 2.0 * math.pi


def principal_phase(theta: float) -> float:
    """Reduce an angle to (-pi, pi].

    Uses round-half-to-even at the boundary, and maps a resulting -pi to
    +pi.  The PCR bound is insensitive to the choice but the selected
    all-pass form is not, so the reduction is pinned down here once.
    """
    r = theta - _TWO_PI * round(theta / _TWO_PI)
    if r <= -math.pi:
        r += _TWO_PI
    elif r > math.pi:
        r -= _TWO_PI
    return r


class AllPassForm(Enum):
    PLUS_ONE = "PlusOne"
    MINUS_ONE = "MinusOne"
    LEAD = "LeadForm"  # (a - s) / (a + s)
    LAG = "LagForm"  # (s - a) / (s + a)


@dataclass(frozen=True)
class AllPassPerturbation:
    """gain times a zeroth- or first-order all-pass; |delta(jw)| = gain for all w.

    The all-pass factor is normalized to unit modulus, so the H-infinity
    norm is exactly ``gain``.  ``a`` is the (positive) pole/zero parameter of
    the first-order forms and None for the constants.  gain = 0 is allowed
    as the "no perturbation" limit.
    """

    gain: float
    form: AllPassForm
    a: float = None

    def __post_init__(self):
        if self.gain < 0:
            raise ValueError("gain must be nonnegative")
        if self.form in (AllPassForm.LEAD, AllPassForm.LAG):
            if self.a is None or self.a <= 0:
                raise ValueError("first-order forms need a > 0")
        elif self.a is not None:
            raise ValueError("zeroth-order forms take no parameter")

    @property
    def norm_hinf(self) -> float:
        return self.gain

    def as_tf(self) -> RationalTF:
        if self.form is AllPassForm.PLUS_ONE:
            return RationalTF([self.gain], [1.0])
        if self.form is AllPassForm.MINUS_ONE:
            return RationalTF([-self.gain], [1.0])
        if self.form is AllPassForm.LEAD:
            return RationalTF([self.gain * self.a, -self.gain], [self.a, 1.0])
        return RationalTF([-self.gain * self.a, self.gain], [self.a, 1.0])

    def phase_at(self, omega: float) -> float:
        if self.form is AllPassForm.PLUS_ONE:
            return 0.0
        if self.form is AllPassForm.MINUS_ONE:
            return math.pi
        if self.form is AllPassForm.LEAD:
            return -2.0 * math.atan(omega / self.a)
        return principal_phase(math.pi - 2.0 * math.atan(omega / self.a))

    def pcr_at(self, omega: float) -> float:
        if self.form in (AllPassForm.PLUS_ONE, AllPassForm.MINUS_ONE):
            return 0.0
        return -2.0 * self.a / (self.a * self.a + omega * omega)


def pcr_upper_bound(omega_p: float, theta_p: float) -> float:
    """Largest PCR achievable at a gain peak (omega_p, phase theta_p)."""
    theta_p = principal_phase(theta_p)
    if omega_p == 0.0:
        if abs(theta_p) > ZERO_PHASE_TOL and abs(abs(theta_p) - math.pi) > ZERO_PHASE_TOL:
            raise InfeasiblePhaseError(
                f"infeasible phase at DC: theta={theta_p!r} not in {{0, pi}}"
            )
        return 0.0
    if omega_p < 0:
        raise ValueError("peak frequency must be nonnegative")
    return -abs(math.sin(theta_p)) / omega_p


def optimal_allpass(omega_p: float, theta_p: float) -> AllPassPerturbation:
    """Unit-gain all-pass achieving the PCR upper bound at (omega_p, theta_p).

    Contracts (each holds to 1e-9): phase_at(omega_p) == theta_p mod 2pi,
    unit modulus everywhere, pcr_at(omega_p) == pcr_upper_bound.
    """
    theta_p = principal_phase(theta_p)
    if omega_p == 0.0:
        if abs(theta_p) <= ZERO_PHASE_TOL:
            return AllPassPerturbation(1.0, AllPassForm.PLUS_ONE)
        if abs(abs(theta_p) - math.pi) <= ZERO_PHASE_TOL:
            return AllPassPerturbation(1.0, AllPassForm.MINUS_ONE)
        raise InfeasiblePhaseError(
            f"infeasible phase at DC: theta={theta_p!r} not in {{0, pi}}"
        )
    if omega_p < 0:
        raise ValueError("peak frequency must be nonnegative")
    if abs(theta_p) <= ZERO_PHASE_TOL:
        return AllPassPerturbation(1.0, AllPassForm.PLUS_ONE)
    if abs(theta_p - math.pi) <= ZERO_PHASE_TOL:
        return AllPassPerturbation(1.0, AllPassForm.MINUS_ONE)
    if theta_p < 0.0:
        # -2 atan(w/a) = theta_p
        a = omega_p / math.tan(-theta_p / 2.0)
        return AllPassPerturbation(1.0, AllPassForm.LEAD, a=a)
    # pi - 2 atan(w/a) = theta_p
    a = omega_p / math.tan((math.pi - theta_p) / 2.0)
    return AllPassPerturbation(1.0, AllPassForm.LAG, a=a)


def marginal_perturbation(peak) -> AllPassPerturbation:
    """Candidate marginally-stabilizing perturbation built at a gain peak.

    The phase is set to -theta_g(w_p) and the gain to 1/|g(jw_p)|, so the
    loop g*delta passes exactly through +1 at the peak frequency.
    """
    if peak.gain <= 0.0:
        raise ValueError("peak gain must be positive")
    f = optimal_allpass(peak.freq, principal_phase(-peak.phase))
    return AllPassPerturbation(1.0 / peak.gain, f.form, a=f.a)
