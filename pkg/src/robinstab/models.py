"""Plant factories for the three case-study families.

Cyclic network: an odd ring of 2m+1 identical first-order agents closed
under positive feedback with loop gain k, g_m = -k/((s+1)^(2m+1) + k).

Magnetic levitation: the mechanically unstable pole pair +/-p plus the
electrical lag 1/(tau s + 1); a reduced model drops the lag.  A phase-lead
compensator and a family of low-norm stabilizing controllers accompany it.

Repressilator: a three-gene cyclic repression loop, linearized, with a
transport delay approximated by a diagonal Pade all-pass so that everything
stays rational.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .allpass import AllPassPerturbation
from .lti import RationalTF, positive_feedback
from .poly import ON_AXIS_REL_TOL, Polynomial

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CyclicSpec:
    """Ring of 2m+1 agents with loop gain k."""

    m: int
    k: float = 20.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.k <= 0:
            raise ValueError("k must be positive")


@dataclass(frozen=True)
class MaglevSpec:
    """Unstable mechanical pole p [rad/s], electrical time constant tau [s], gain k."""

    p: float
    tau: float
    k: float = 1.0

    def __post_init__(self):
        if self.p <= 0 or self.tau <= 0 or self.k <= 0:
            raise ValueError("p, tau, k must all be positive")
        if 1.0 / self.tau < 10.0 * self.p:
            log.warning(
                "electrical pole 1/tau=%.4g is not well separated from p=%.4g; "
                "model reduction arguments weaken",
                1.0 / self.tau,
                self.p,
            )


@dataclass(frozen=True)
class RepressilatorSpec:
    """Degradation rates [1/h], loop gain, delay [h], Pade order."""

    tau: float = 0.0
    alpha1: float = 0.4621
    alpha2: float = 0.5545
    alpha3: float = 0.3697
    k: float = 2.216
    pade_order: int = 5

    def __post_init__(self):
        if min(self.alpha1, self.alpha2, self.alpha3, self.k) <= 0:
            raise ValueError("rates and gain must be positive")
        if self.tau < 0:
            raise ValueError("delay must be nonnegative")
        if self.pade_order < 1:
            raise ValueError("pade_order must be >= 1")


def cyclic_network(spec: CyclicSpec) -> RationalTF:
    """g_m = -k/((s+1)^(2m+1) + k), built two ways that must agree.

    The direct binomial expansion and the closed positive-feedback loop of
    -k/(s+1)^(2m+1) are both computed; a mismatch beyond 1e-12 relative
    would indicate coefficient corruption, so it raises.
    """
    n = 2 * spec.m + 1
    ring = Polynomial([1.0, 1.0])
    sp1n = Polynomial([1.0])
    for _ in range(n):
        sp1n = sp1n * ring
    direct = RationalTF(Polynomial([-spec.k]), sp1n + Polynomial([spec.k]))
    via_loop = positive_feedback(RationalTF(Polynomial([-spec.k]), sp1n))
    if not direct.den.allclose(via_loop.den, rtol=1e-12) or not direct.num.allclose(
        via_loop.num, rtol=1e-12
    ):
        raise RuntimeError("cyclic network construction paths disagree")
    return direct


def pade_delay(tau: float, order: int = 5) -> RationalTF:
    """Diagonal (order, order) Pade approximant of a transport delay of tau.

    P(x) = sum_k c_k x^k with c_k = (2n-k)! n! / ((2n)! k! (n-k)!), returned
    as P(-tau s)/P(tau s).  The coefficients come from the incremental ratio
    c_k = c_{k-1} (n-k+1) / ((2n-k+1) k), which stays exact in floating
    point far beyond the orders used here.  The result is all-pass with
    unit DC gain.
    """
    if tau <= 0:
        raise ValueError("delay must be positive")
    if order < 1:
        raise ValueError("order must be >= 1")
    n = order
    c = np.empty(n + 1)
    c[0] = 1.0
    for k in range(1, n + 1):
        c[k] = c[k - 1] * (n - k + 1) / ((2 * n - k + 1) * k)
    powers = tau ** np.arange(n + 1)
    num = c * powers * (-1.0) ** np.arange(n + 1)
    den = c * powers
    return RationalTF(num, den)


def repressilator(spec: RepressilatorSpec) -> RationalTF:
    """Closed-loop plant h D / (1 - h D) with h = -k / prod (s + alpha_i).

    The nominal loop is expected to be exponentially unstable (that is what
    makes the oscillator oscillate); if it is not, analysis still proceeds
    but a warning is logged.
    """
    h_den = (
        Polynomial([spec.alpha1, 1.0])
        * Polynomial([spec.alpha2, 1.0])
        * Polynomial([spec.alpha3, 1.0])
    )
    h = RationalTF(Polynomial([-spec.k]), h_den)
    loop = h * pade_delay(spec.tau, spec.pade_order) if spec.tau > 0 else h
    g = positive_feedback(loop)
    poles = g.poles()
    n_unstable = int(
        np.sum(poles.real > ON_AXIS_REL_TOL * np.maximum(1.0, np.abs(poles)))
    )
    if n_unstable == 0:
        log.warning(
            "repressilator nominal loop is not exponentially unstable "
            "(tau=%.4g); instability-radius analysis is vacuous here",
            spec.tau,
        )
    return g


def repressilator_perturbation(
    base: AllPassPerturbation, eps: float, cutoff: float = 0.01
) -> RationalTF:
    """DC-blocked scaled perturbation (s/(s+cutoff)) * (1+eps) * base.

    The high-pass factor pins the perturbation's DC gain to exactly zero
    (the loop gain at equilibrium is taken as exactly known); eps scales the
    magnitude around the marginal value.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    high_pass = RationalTF([0.0, 1.0], [cutoff, 1.0])
    return high_pass * base.as_tf() * (1.0 + eps)


class MaglevVariant(Enum):
    FULL_THIRD_ORDER = "full"
    REDUCED_SECOND_ORDER = "reduced"


def maglev(spec: MaglevSpec, variant=MaglevVariant.FULL_THIRD_ORDER) -> RationalTF:
    """k/((-s^2+p^2)(tau s+1)) or the reduced k/(-s^2+p^2)."""
    mech = Polynomial([spec.p**2, 0.0, -1.0])
    if variant is MaglevVariant.REDUCED_SECOND_ORDER:
        return RationalTF(Polynomial([spec.k]), mech)
    return RationalTF(Polynomial([spec.k]), mech * Polynomial([1.0, spec.tau]))


def maglev_compensator(spec: MaglevSpec, tau_c: float = None) -> RationalTF:
    """Phase-lead compensator ((tau_c+tau)s+1)/(tau_c s+1).

    The compensated plant g*f has zero PCR at DC for any tau_c > 0; the
    default tau_c = 1/(p^2 tau) is the largest value for which the DC gain
    still dominates every other frequency.
    """
    if tau_c is None:
        tau_c = 1.0 / (spec.p**2 * spec.tau)
    if tau_c <= 0:
        raise ValueError("tau_c must be positive")
    return RationalTF([1.0, tau_c + spec.tau], [1.0, tau_c])


class ControllerVariant(Enum):
    FOR_REDUCED = "reduced"
    FOR_COMPENSATED = "compensated"


def maglev_epsilon_controller(
    spec: MaglevSpec, eps: float, q: float, variant=ControllerVariant.FOR_COMPENSATED
) -> RationalTF:
    """Stable controller p^2/k + eps (s + z)/(s + pole) approaching norm p^2/k.

    FOR_REDUCED uses (z, pole) = (eps^2, q).  FOR_COMPENSATED uses
    (z, pole) = (eps^2, q*(1/tau + p^2 tau)): with that pole the closed loop
    around the lead-compensated plant has the monic characteristic quintic

        s^5 + (q+1)d s^4 + q d^2 s^3 + k eps d s^2
            + k eps (p^2 + eps^2 d) s + k eps^3 p^2,

    where d = 1/tau + p^2 tau, which is Hurwitz for small eps with q inside
    a widening window.
    """
    if eps <= 0 or q <= 0:
        raise ValueError("eps and q must be positive")
    flat = spec.p**2 / spec.k
    if variant is ControllerVariant.FOR_REDUCED:
        pole = q
    else:
        pole = q * (1.0 / spec.tau + spec.p**2 * spec.tau)
    num = Polynomial([flat * pole, flat]) + Polynomial([eps * eps**2, eps])
    return RationalTF(num, Polynomial([pole, 1.0]))
