"""Robust instability radius: exact certificates, interval bounds, violations.

For an unstable strictly proper g, the smallest H-infinity norm of a stable
real-rational perturbation that internally stabilizes the positive-feedback
loop is never below 1/||g||_Linf.  The engine decides, per system, whether
that lower bound is attained (ExactRIR, with a verified marginal-stabilizing
certificate), strictly exceeded (NecessaryViolated), sandwiched between the
bound and a verified upper bound from a secondary peak (Bounded), or
undecidable with the machinery available (Inconclusive).

The decision pivots on the PCR condition at the global gain peak,

    theta_g'(w_p) > |sin(theta_g(w_p))| / w_p      (w_p > 0)
    theta_g'(0)   > 0                              (w_p = 0),

which is sufficient (strict) and necessary (non-strict) for the exact
radius when g has one unstable pole peaking at DC or two unstable poles
peaking at a nonzero frequency; the necessary direction holds for any
number of unstable poles.  A single unstable pole peaking at a nonzero
frequency can never attain the bound.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .allpass import AllPassPerturbation, marginal_perturbation
from .errors import AnalysisError, HiddenModeError, PoleOnAxisError
from .lti import ClassTag, PeakShape, RationalTF, classify
from .peaks import PeakInfo, PeakList, local_peaks
from .poly import (
    ON_AXIS_REL_TOL,
    Polynomial,
    StabilityKind,
    StabilityVerdict,
    stability_from_roots,
)

#: Margins within [-TOL_STRICT, TOL_STRICT] fall in a gray zone where the
#: strict/non-strict distinction is numerically undecidable; the verdict is
#: then Inconclusive rather than a guess.
TOL_STRICT = 1e-9


@dataclass(frozen=True)
class PcrCheck:
    margin: float
    holds_strict: bool
    holds_weak: bool


def pcr_condition(g: RationalTF, peak: PeakInfo) -> PcrCheck:
    """Margin of the PCR condition at a gain peak of g."""
    if peak.freq > 0.0:
        margin = peak.pcr - abs(np.sin(peak.phase)) / peak.freq
    else:
        margin = peak.pcr
    return PcrCheck(
        margin=float(margin),
        holds_strict=margin > TOL_STRICT,
        holds_weak=margin > -TOL_STRICT,
    )


@dataclass(frozen=True)
class MarginalEvidence:
    """Closed-loop evidence for one candidate perturbation.

    ``verdict`` classifies the characteristic roots; marginal stabilization
    in the certificate sense additionally needs exactly one simple conjugate
    axis pair, exposed as :attr:`is_single_pair_marginal`.
    """

    closed_loop_char_poly: Polynomial
    axis_pair_freq: float
    max_real_part: float
    verdict: StabilityVerdict

    @property
    def is_single_pair_marginal(self) -> bool:
        return (
            self.verdict.kind is StabilityKind.MARGINALLY_STABLE
            and len(self.verdict.imaginary_axis_roots) == 1
            and self.verdict.imaginary_axis_roots[0] > 0.0
        )


def verify_marginal_stabilization(
    g: RationalTF, delta: AllPassPerturbation
) -> MarginalEvidence:
    """Root-level check of the loop closed around g with perturbation delta.

    Builds the characteristic polynomial den_g*den_d - num_g*num_d of the
    positive feedback 1 - g*delta = 0, roots it, and classifies.  Before
    trusting the characteristic roots it audits that no ORHP pole-zero
    cancellation occurs between g and delta (a cancelled unstable mode would
    be invisible to the characteristic polynomial).
    """
    dtf = delta.as_tf()
    _audit_no_orhp_cancellation(g, dtf)
    char = g.den * dtf.den - g.num * dtf.num
    if char.degree < 1:
        raise AnalysisError("degenerate closed loop: constant characteristic polynomial")
    roots = char.roots()
    verdict = stability_from_roots(roots)
    axis_freq = (
        verdict.imaginary_axis_roots[0]
        if len(verdict.imaginary_axis_roots) == 1
        else 0.0
    )
    return MarginalEvidence(
        closed_loop_char_poly=char,
        axis_pair_freq=float(axis_freq),
        max_real_part=float(np.max(roots.real)),
        verdict=verdict,
    )


def _audit_no_orhp_cancellation(g: RationalTF, dtf: RationalTF):
    def orhp(points):
        return [
            p
            for p in points
            if p.real > ON_AXIS_REL_TOL * max(1.0, abs(p))
        ]

    def clash(a_points, b_points):
        for a in a_points:
            for b in b_points:
                if abs(a - b) <= 1e-7 * max(1.0, abs(a)):
                    return a
        return None

    d_zeros = dtf.zeros() if dtf.num.degree >= 1 else []
    hit = clash(orhp(d_zeros), orhp(g.poles()))
    if hit is not None:
        raise HiddenModeError(
            f"internal stability violated (hidden mode): perturbation zero "
            f"cancels unstable plant pole near s={hit}"
        )
    d_poles = dtf.poles() if dtf.den.degree >= 1 else []
    g_zeros = g.zeros() if g.num.degree >= 1 else []
    hit = clash(orhp(d_poles), orhp(g_zeros))
    if hit is not None:
        raise HiddenModeError(
            f"internal stability violated (hidden mode): perturbation pole "
            f"cancels plant zero near s={hit}"
        )


class RirStatus(Enum):
    EXACT = "ExactRIR"
    BOUNDED = "Bounded"
    NECESSARY_VIOLATED = "NecessaryViolated"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class PerturbationTrial:
    """One candidate perturbation and what its closed loop did."""

    peak_freq: float
    peak_gain: float
    delta: AllPassPerturbation
    evidence: MarginalEvidence


@dataclass(frozen=True)
class RirVerdict:
    status: RirStatus
    lower: float
    lower_strict: bool
    upper: float = None
    certificate: PerturbationTrial = None
    trials: tuple = field(default_factory=tuple)
    notes: tuple = field(default_factory=tuple)

    def interval_str(self) -> str:
        lo = "(" if self.lower_strict else "["
        if self.upper is None:
            return f"{lo}{self.lower:.6g}, inf)"
        return f"{lo}{self.lower:.6g}, {self.upper:.6g}]"


def rir_verdict(g: RationalTF, peaks: PeakList = None, tag: ClassTag = None) -> RirVerdict:
    """Full instability-radius decision procedure for one plant.

    Requires g strictly proper and exponentially unstable with no
    imaginary-axis poles; peaks/tag may be passed in to reuse an existing
    analysis.
    """
    if not g.is_strictly_proper:
        raise AnalysisError("plant must be strictly proper")
    try:
        n_unstable, _ = g.unstable_poles()
    except PoleOnAxisError as exc:
        raise AnalysisError(str(exc)) from exc
    if n_unstable == 0:
        raise AnalysisError("plant is stable: not in class G (no unstable poles)")

    if peaks is None:
        peaks = local_peaks(g)
    if tag is None:
        tag = classify(g, peaks)
    top = peaks.global_peak
    lower = 1.0 / top.gain
    notes = []

    if not tag.pip_ok:
        notes.append(
            "parity interlacing property violated: no stable perturbation "
            "stabilizes this plant (radius infinite)"
        )
        return RirVerdict(
            RirStatus.INCONCLUSIVE, lower, False, notes=tuple(notes)
        )
    if tag.shape is PeakShape.NEITHER:
        notes.append(tag.note or "global peak not unique")
        return RirVerdict(
            RirStatus.INCONCLUSIVE, lower, False, notes=tuple(notes)
        )

    if tag.n_unstable == 1 and tag.shape is PeakShape.PEAK_AT_NONZERO:
        notes.append(
            "one unstable pole with a nonzero-frequency peak: the lower bound "
            "is never attained"
        )
        return RirVerdict(
            RirStatus.NECESSARY_VIOLATED, lower, True, notes=tuple(notes)
        )

    check = pcr_condition(g, top)
    in_gray_zone = not check.holds_strict and check.holds_weak

    if in_gray_zone:
        notes.append(
            f"PCR margin {check.margin!r} inside the +/-{TOL_STRICT:g} gray "
            "zone: strict/non-strict distinction undecidable"
        )
        return RirVerdict(
            RirStatus.INCONCLUSIVE, lower, False, notes=tuple(notes)
        )

    lower_strict = False
    status = None
    if not check.holds_weak:
        # PCR fails at the global peak: the bound is strictly exceeded for
        # any number of unstable poles
        status = RirStatus.NECESSARY_VIOLATED
        lower_strict = True
        notes.append(f"PCR condition fails at the global peak (margin {check.margin!r})")

    trials = []
    certificate = None
    upper = None
    scan = peaks.peaks if check.holds_strict else peaks.local_peaks
    for pk in scan:
        try:
            delta = marginal_perturbation(pk)
            evidence = verify_marginal_stabilization(g, delta)
        except AnalysisError as exc:
            notes.append(f"candidate at w={pk.freq!r} rejected: {exc}")
            continue
        trial = PerturbationTrial(pk.freq, pk.gain, delta, evidence)
        trials.append(trial)
        if evidence.is_single_pair_marginal:
            certificate = trial
            if pk.is_global:
                # a verified global-peak certificate attains the bound even
                # outside the sufficient shapes (marginal stabilization at
                # norm 1/||g|| implies exactness regardless of pole count)
                status = RirStatus.EXACT
                upper = lower
            else:
                # lower_strict survives from the necessary-violation branch
                upper = 1.0 / pk.gain
                status = RirStatus.BOUNDED
            break

    if status is None:
        status = RirStatus.INCONCLUSIVE
        notes.append("no candidate perturbation verified marginal stabilization")
    elif status is RirStatus.BOUNDED and not lower_strict:
        notes.append(
            "upper bound from a secondary peak; attainment of the lower bound "
            "remains open"
        )

    return RirVerdict(
        status=status,
        lower=lower,
        lower_strict=lower_strict,
        upper=upper,
        certificate=certificate,
        trials=tuple(trials),
        notes=tuple(notes),
    )
