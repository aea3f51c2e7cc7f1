"""Analysis orchestration, parameter sweeps, and report serialization.

Reports are deterministic: the same configuration produces byte-identical
JSON (floats rendered with 17 significant digits, keys sorted, atomic
writes).  Every tolerance and grid setting that influenced the numbers is
echoed into the provenance block.
"""

import dataclasses
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._version import __version__ as _version
from .allpass import AllPassForm, AllPassPerturbation, marginal_perturbation
from .errors import AnalysisError, ConfigError
from .lti import GAIN_TIE_REL_TOL, ClassTag, PeakShape, RationalTF, classify
from .models import (
    CyclicSpec,
    MaglevSpec,
    MaglevVariant,
    RepressilatorSpec,
    cyclic_network,
    maglev,
    maglev_compensator,
    repressilator,
    repressilator_perturbation,
)
from .peaks import (
    DEFAULT_REL_FLOOR,
    GridSpec,
    PeakAttribution,
    PeakInfo,
    PeakList,
    local_peaks,
    peak_pole_attribution,
)
from .poly import ON_AXIS_REL_TOL, Polynomial, StabilityKind, StabilityVerdict
from .rir import (
    TOL_STRICT,
    MarginalEvidence,
    PerturbationTrial,
    RirStatus,
    RirVerdict,
    pcr_condition,
    rir_verdict,
)
from .simulate import TimeSeries

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalysisOptions:
    grid_points: int = 4096
    rel_floor: float = DEFAULT_REL_FLOOR
    attribution_window: float = 0.5
    freq_csv_points: int = 2000


@dataclass(frozen=True)
class AnalysisConfig:
    plant: dict
    options: AnalysisOptions = AnalysisOptions()
    perturbation: dict = None

    @classmethod
    def from_dict(cls, raw: dict) -> "AnalysisConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        plant = raw.get("plant")
        if not isinstance(plant, dict) or "type" not in plant:
            raise ConfigError('configuration needs a "plant" object with a "type"')
        opts_raw = raw.get("options", {})
        if not isinstance(opts_raw, dict):
            raise ConfigError('"options" must be an object')
        known = {f.name for f in dataclasses.fields(AnalysisOptions)}
        unknown = set(opts_raw) - known
        if unknown:
            raise ConfigError(f"unknown options: {sorted(unknown)}")
        try:
            options = AnalysisOptions(**opts_raw)
        except TypeError as exc:
            raise ConfigError(f"bad options: {exc}") from exc
        if options.grid_points < 64:
            raise ConfigError("grid_points must be at least 64")
        if not 0 < options.rel_floor <= 1:
            raise ConfigError("rel_floor must lie in (0, 1]")
        pert = raw.get("perturbation")
        if pert is not None and not isinstance(pert, dict):
            raise ConfigError('"perturbation" must be an object')
        return cls(plant=dict(plant), options=options, perturbation=pert)

    @classmethod
    def load(cls, path) -> "AnalysisConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)


def build_plant(plant: dict) -> RationalTF:
    """Instantiate the plant described by a config "plant" object."""
    kind = plant.get("type")
    params = {k: v for k, v in plant.items() if k != "type"}
    try:
        if kind == "explicit":
            num = params.pop("num")
            den = params.pop("den")
            _reject_extra(params)
            return RationalTF(num, den)
        if kind == "cyclic":
            spec = CyclicSpec(m=int(params.pop("m")), k=float(params.pop("k", 20.0)))
            _reject_extra(params)
            return cyclic_network(spec)
        if kind == "maglev":
            spec = MaglevSpec(
                p=float(params.pop("p")),
                tau=float(params.pop("tau")),
                k=float(params.pop("k", 1.0)),
            )
            variant = (
                MaglevVariant.REDUCED_SECOND_ORDER
                if params.pop("variant", "full") == "reduced"
                else MaglevVariant.FULL_THIRD_ORDER
            )
            compensate = params.pop("compensate", False)
            _reject_extra(params)
            g = maglev(spec, variant)
            if compensate:
                tau_c = None if compensate is True else float(compensate)
                g = g * maglev_compensator(spec, tau_c)
            return g
        if kind == "repressilator":
            spec = RepressilatorSpec(
                tau=float(params.pop("tau", 0.0)),
                alpha1=float(params.pop("alpha1", 0.4621)),
                alpha2=float(params.pop("alpha2", 0.5545)),
                alpha3=float(params.pop("alpha3", 0.3697)),
                k=float(params.pop("k", 2.216)),
                pade_order=int(params.pop("pade_order", 5)),
            )
            _reject_extra(params)
            return repressilator(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad {kind!r} plant: {exc}") from exc
    raise ConfigError(f"unknown plant type {kind!r}")


def _reject_extra(params):
    if params:
        raise ConfigError(f"unknown plant fields: {sorted(params)}")


# ---------------------------------------------------------------------------
# analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalysisReport:
    class_tag: ClassTag
    peaks: PeakList
    attributions: tuple
    pcr_margins: tuple
    rir: RirVerdict
    provenance: dict = field(default_factory=dict)


def run_analysis(config: AnalysisConfig) -> AnalysisReport:
    """Classify the plant, find its peaks, and decide its instability radius."""
    g = build_plant(config.plant)
    peaks = local_peaks(
        g, rel_floor=config.options.rel_floor, n_points=config.options.grid_points
    )
    tag = classify(g, peaks)
    attributions = tuple(
        peak_pole_attribution(g, p, window_rel=config.options.attribution_window)
        for p in peaks.peaks
    )
    margins = tuple(pcr_condition(g, p).margin for p in peaks.peaks)
    verdict = rir_verdict(g, peaks=peaks, tag=tag)
    provenance = {
        "tool": "robinstab",
        "version": _version,
        "schema_version": SCHEMA_VERSION,
        "kernels": "numba" if _kernels.USING_NUMBA else "numpy",
        "config": {
            "plant": config.plant,
            "options": dataclasses.asdict(config.options),
        },
        "tolerances": {
            "on_axis_rel": ON_AXIS_REL_TOL,
            "strict_margin": TOL_STRICT,
            "gain_tie_rel": GAIN_TIE_REL_TOL,
        },
    }
    return AnalysisReport(
        class_tag=tag,
        peaks=peaks,
        attributions=attributions,
        pcr_margins=margins,
        rir=verdict,
        provenance=provenance,
    )


def build_perturbation(config: AnalysisConfig, report: AnalysisReport):
    """Materialize the configured perturbation as a transfer function.

    Kinds: {"type": "none"}, {"type": "explicit", "num": [...], "den": [...]},
    and {"type": "marginal", "peak": "global"|index, "epsilon": e,
    "dc_block": cutoff|null} which scales the peak-built marginal
    perturbation by (1+epsilon) and optionally DC-blocks it.
    """
    pert = config.perturbation or {"type": "none"}
    kind = pert.get("type", "none")
    if kind == "none":
        return None
    if kind == "explicit":
        try:
            return RationalTF(pert["num"], pert["den"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad explicit perturbation: {exc}") from exc
    if kind == "marginal":
        which = pert.get("peak", "global")
        plist = report.peaks.peaks
        if which == "global":
            peak = plist[0]
        else:
            try:
                peak = plist[int(which)]
            except (ValueError, IndexError) as exc:
                raise ConfigError(f"bad perturbation peak {which!r}") from exc
        delta = marginal_perturbation(peak)
        eps = float(pert.get("epsilon", 0.0))
        cutoff = pert.get("dc_block")
        if cutoff is None:
            return delta.as_tf() * (1.0 + eps)
        return repressilator_perturbation(delta, eps, float(cutoff))
    raise ConfigError(f"unknown perturbation type {kind!r}")


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

_INT_PARAMS = {"m", "pade_order"}


@dataclass(frozen=True)
class SweepRow:
    value: float
    shape: str
    n_unstable: int
    peak_count: int
    pcr_margin: float
    rir_status: str
    lower: float
    upper: float = None
    error: str = ""

    @property
    def status_key(self):
        return (
            self.shape,
            self.n_unstable,
            self.peak_count,
            self.pcr_margin > 0,
            self.rir_status,
            self.error,
        )


@dataclass(frozen=True)
class SweepTransition:
    lo: float
    hi: float
    status_lo: tuple
    status_hi: tuple


@dataclass(frozen=True)
class SweepResult:
    param: str
    rows: tuple
    transitions: tuple


def _sweep_point(config: AnalysisConfig, param: str, value) -> SweepRow:
    plant = dict(config.plant)
    plant[param] = int(value) if param in _INT_PARAMS else float(value)
    try:
        report = run_analysis(
            AnalysisConfig(plant=plant, options=config.options)
        )
    except AnalysisError as exc:
        return SweepRow(
            value=float(value),
            shape="",
            n_unstable=-1,
            peak_count=0,
            pcr_margin=float("nan"),
            rir_status="",
            lower=float("nan"),
            error=str(exc),
        )
    tag = report.class_tag
    return SweepRow(
        value=float(value),
        shape=tag.shape.value,
        n_unstable=tag.n_unstable,
        peak_count=len(report.peaks.peaks),
        pcr_margin=report.pcr_margins[0],
        rir_status=report.rir.status.value,
        lower=report.rir.lower,
        upper=report.rir.upper,
    )


def run_sweep(
    config: AnalysisConfig,
    param: str,
    lo: float,
    hi: float,
    steps: int,
    refine: bool = False,
    refine_width: float = 1e-3,
) -> SweepResult:
    """Sweep one plant parameter and locate qualitative status changes.

    With refine=True every bracket whose endpoints differ in status is
    bisected down to ``refine_width`` in the parameter (skipped for integer
    parameters, whose natural resolution is 1).
    """
    sweepable = {
        "cyclic": {"m", "k"},
        "maglev": {"p", "tau", "k"},
        "repressilator": {"tau", "k", "alpha1", "alpha2", "alpha3", "pade_order"},
        "explicit": set(),
    }.get(config.plant.get("type"), set())
    if param not in sweepable:
        raise ConfigError(f"parameter {param!r} not available for this plant")
    if hi <= lo:
        raise ConfigError("sweep range must have hi > lo")
    if param in _INT_PARAMS:
        values = list(range(int(lo), int(hi) + 1))
    else:
        values = list(np.linspace(lo, hi, max(int(steps), 2)))
    rows = [_sweep_point(config, param, v) for v in values]
    transitions = []
    for left, right in zip(rows[:-1], rows[1:]):
        if left.status_key == right.status_key:
            continue
        a, fa = left.value, left.status_key
        b, fb = right.value, right.status_key
        if refine and param not in _INT_PARAMS:
            while (b - a) > refine_width:
                mid = 0.5 * (a + b)
                fm = _sweep_point(config, param, mid).status_key
                if fm == fa:
                    a = mid
                else:
                    b, fb = mid, fm
        transitions.append(SweepTransition(lo=a, hi=b, status_lo=fa, status_hi=fb))
    return SweepResult(param=param, rows=tuple(rows), transitions=tuple(transitions))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite float {x!r} cannot be serialized")
    return format(float(x), ".17g")


def _emit(obj, parts):
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, dict):
        parts.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                parts.append(",")
            parts.append(json.dumps(str(key)))
            parts.append(":")
            _emit(obj[key], parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        parts.append("[")
        for i, item in enumerate(obj):
            if i:
                parts.append(",")
            _emit(item, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    parts = []
    _emit(obj, parts)
    return "".join(parts)


def atomic_write(path, data: str):
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _delta_to_dict(delta: AllPassPerturbation) -> dict:
    return {"gain": delta.gain, "form": delta.form.value, "a": delta.a}


def _delta_from_dict(d) -> AllPassPerturbation:
    return AllPassPerturbation(gain=d["gain"], form=AllPassForm(d["form"]), a=d["a"])


def _trial_to_dict(trial: PerturbationTrial) -> dict:
    ev = trial.evidence
    return {
        "peak_freq": trial.peak_freq,
        "peak_gain": trial.peak_gain,
        "delta": _delta_to_dict(trial.delta),
        "evidence": {
            "char_poly": ev.closed_loop_char_poly.coeffs,
            "axis_pair_freq": ev.axis_pair_freq,
            "max_real_part": ev.max_real_part,
            "verdict": {
                "kind": ev.verdict.kind.value,
                "unstable_count": ev.verdict.unstable_count,
                "imaginary_axis_roots": ev.verdict.imaginary_axis_roots,
            },
        },
    }


def _trial_from_dict(d) -> PerturbationTrial:
    ev = d["evidence"]
    return PerturbationTrial(
        peak_freq=d["peak_freq"],
        peak_gain=d["peak_gain"],
        delta=_delta_from_dict(d["delta"]),
        evidence=MarginalEvidence(
            closed_loop_char_poly=Polynomial(ev["char_poly"]),
            axis_pair_freq=ev["axis_pair_freq"],
            max_real_part=ev["max_real_part"],
            verdict=StabilityVerdict(
                kind=StabilityKind(ev["verdict"]["kind"]),
                unstable_count=ev["verdict"]["unstable_count"],
                imaginary_axis_roots=tuple(ev["verdict"]["imaginary_axis_roots"]),
            ),
        ),
    )


def report_to_dict(report: AnalysisReport) -> dict:
    tag = report.class_tag
    grid = report.peaks.grid
    return {
        "schema_version": SCHEMA_VERSION,
        "class": {
            "n_unstable": tag.n_unstable,
            "pip_ok": tag.pip_ok,
            "shape": tag.shape.value,
            "peak_freq": tag.peak_freq,
            "note": tag.note,
        },
        "peaks": {
            "grid": {
                "w_min": grid.w_min,
                "w_max": grid.w_max,
                "n_points": grid.n_points,
                "rel_floor": grid.rel_floor,
                "refine_rel_tol": grid.refine_rel_tol,
            },
            "items": [
                {
                    "freq": p.freq,
                    "gain": p.gain,
                    "phase": p.phase,
                    "pcr": p.pcr,
                    "is_global": p.is_global,
                    "merged": p.merged,
                    "attribution": attr.value,
                    "pcr_margin": margin,
                }
                for p, attr, margin in zip(
                    report.peaks.peaks, report.attributions, report.pcr_margins
                )
            ],
        },
        "rir": {
            "status": report.rir.status.value,
            "lower": report.rir.lower,
            "lower_strict": report.rir.lower_strict,
            "upper": report.rir.upper,
            "interval": report.rir.interval_str(),
            "certificate": (
                _trial_to_dict(report.rir.certificate)
                if report.rir.certificate
                else None
            ),
            "trials": [_trial_to_dict(t) for t in report.rir.trials],
            "notes": list(report.rir.notes),
        },
        "provenance": report.provenance,
    }


def report_from_dict(d: dict) -> AnalysisReport:
    cls = d["class"]
    tag = ClassTag(
        n_unstable=cls["n_unstable"],
        pip_ok=cls["pip_ok"],
        shape=PeakShape(cls["shape"]),
        peak_freq=cls["peak_freq"],
        note=cls["note"],
    )
    gd = d["peaks"]["grid"]
    grid = GridSpec(
        w_min=gd["w_min"],
        w_max=gd["w_max"],
        n_points=gd["n_points"],
        rel_floor=gd["rel_floor"],
        refine_rel_tol=gd["refine_rel_tol"],
    )
    items = d["peaks"]["items"]
    peaks = tuple(
        PeakInfo(
            freq=i["freq"],
            gain=i["gain"],
            phase=i["phase"],
            pcr=i["pcr"],
            is_global=i["is_global"],
            merged=i["merged"],
        )
        for i in items
    )
    rd = d["rir"]
    rir = RirVerdict(
        status=RirStatus(rd["status"]),
        lower=rd["lower"],
        lower_strict=rd["lower_strict"],
        upper=rd["upper"],
        certificate=(
            _trial_from_dict(rd["certificate"]) if rd["certificate"] else None
        ),
        trials=tuple(_trial_from_dict(t) for t in rd["trials"]),
        notes=tuple(rd["notes"]),
    )
    return AnalysisReport(
        class_tag=tag,
        peaks=PeakList(peaks=peaks, grid=grid),
        attributions=tuple(PeakAttribution(i["attribution"]) for i in items),
        pcr_margins=tuple(i["pcr_margin"] for i in items),
        rir=rir,
        provenance=d["provenance"],
    )


# ---------------------------------------------------------------------------
# file exports
# ---------------------------------------------------------------------------

def export_report_json(report: AnalysisReport, path) -> None:
    atomic_write(path, dumps_json(report_to_dict(report)) + "\n")


def export_freq_response_csv(g: RationalTF, report: AnalysisReport, path) -> None:
    """CSV columns: freq_rad_s,gain,gain_db,phase_rad,pcr.

    The refined peak frequencies are merged into the grid so the maximal
    CSV row reproduces the reported peak exactly.
    """
    grid = report.peaks.grid
    n = report.provenance.get("config", {}).get("options", {}).get(
        "freq_csv_points", 2000
    )
    ws = np.geomspace(grid.w_min, grid.w_max, int(n))
    peak_freqs = [p.freq for p in report.peaks.peaks if np.isfinite(p.freq)]
    ws = np.unique(np.concatenate([ws, np.asarray(peak_freqs)]))
    ws = ws[ws >= 0]
    num, den = g.num.coeffs, g.den.coeffs
    resp = _kernels.response_grid(num, den, ws)
    pcr = _kernels.phase_slope_grid(
        num, g.num.derivative().coeffs, den, g.den.derivative().coeffs, ws
    )
    gain = np.abs(resp)
    lines = ["freq_rad_s,gain,gain_db,phase_rad,pcr"]
    for i in range(ws.size):
        lines.append(
            ",".join(
                _fmt_float(v)
                for v in (
                    ws[i],
                    gain[i],
                    20.0 * np.log10(gain[i]),
                    np.angle(resp[i]),
                    pcr[i],
                )
            )
        )
    atomic_write(path, "\n".join(lines) + "\n")


def export_timeseries_csv(series: TimeSeries, path) -> None:
    """CSV columns: t,y."""
    lines = ["t,y"]
    for t, y in zip(series.t, series.y):
        lines.append(f"{_fmt_float(t)},{_fmt_float(y)}")
    atomic_write(path, "\n".join(lines) + "\n")


def export_sweep_csv(result: SweepResult, path) -> None:
    lines = [
        f"{result.param},shape,n_unstable,peak_count,pcr_margin,rir_status,lower,upper,error"
    ]
    for row in result.rows:
        upper = "" if row.upper is None else _fmt_float(row.upper)
        margin = "nan" if row.pcr_margin != row.pcr_margin else _fmt_float(row.pcr_margin)
        lower = "nan" if row.lower != row.lower else _fmt_float(row.lower)
        lines.append(
            f"{_fmt_float(row.value)},{row.shape},{row.n_unstable},"
            f"{row.peak_count},{margin},{row.rir_status},{lower},{upper},"
            f"{json.dumps(row.error) if row.error else ''}"
        )
    atomic_write(path, "\n".join(lines) + "\n")
