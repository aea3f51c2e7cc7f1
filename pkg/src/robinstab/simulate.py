"""Linear time simulation of closed loops via fixed-step RK4.

The closed loop of plant g under positive-feedback perturbation delta is
realized from polynomials in controllable canonical form; the simulated
response is the disturbance-to-output map g/(1 - g delta).  Impulse input
and seeded random initial states both reduce to the autonomous system
x' = Ax, which the RK4 kernel integrates.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SimulationError
from .lti import RationalTF


@dataclass(frozen=True)
class TimeSeries:
    t: np.ndarray
    y: np.ndarray


def closed_loop(g: RationalTF, delta: RationalTF = None) -> RationalTF:
    """Disturbance-to-output transfer g/(1 - g*delta); delta None means open loop."""
    if delta is None:
        return g
    return RationalTF(
        g.num * delta.den, g.den * delta.den - g.num * delta.num
    )


def companion_realization(tf: RationalTF):
    """Controllable canonical (A, b, c, d) of a proper transfer function."""
    if not tf.is_proper:
        raise SimulationError("cannot realize an improper transfer function")
    den = tf.den.coeffs
    n = den.size - 1
    if n == 0:
        raise SimulationError("static systems have no state to simulate")
    num = np.zeros(n + 1)
    num[: tf.num.coeffs.size] = tf.num.coeffs
    d = num[n]  # den is monic by RationalTF canonicalization
    c = num[:n] - d * den[:n]
    a = np.zeros((n, n))
    if n > 1:
        a[:-1, 1:] = np.eye(n - 1)
    a[-1, :] = -den[:n]
    b = np.zeros(n)
    b[-1] = 1.0
    return a, b, c, d


def simulate_linear(
    g: RationalTF,
    delta: RationalTF = None,
    horizon: float = 100.0,
    dt: float = 0.01,
    input_kind: str = "impulse",
    seed: int = 0,
) -> TimeSeries:
    """Simulate the closed loop of g and delta over [0, horizon].

    input_kind "impulse" applies a unit impulse at t=0 (equivalently starts
    from the state b); "initial-state-random" draws the initial state from a
    seeded standard normal.  The fixed step must satisfy
    dt < 0.1 / max|pole| so RK4 resolves the fastest mode.
    """
    loop = closed_loop(g, delta)
    a, b, c, _ = companion_realization(loop)
    pole_scale = float(np.max(np.abs(loop.poles()))) if loop.den.degree >= 1 else 1.0
    if pole_scale > 0 and dt >= 0.1 / pole_scale:
        raise SimulationError(
            f"dt={dt:g} too large for the closed-loop dynamics; "
            f"need dt < {0.1 / pole_scale:.3g}"
        )
    if input_kind == "impulse":
        x0 = b
    elif input_kind == "initial-state-random":
        x0 = np.random.default_rng(seed).standard_normal(a.shape[0])
    else:
        raise SimulationError(f"unknown input kind {input_kind!r}")
    n_steps = int(np.ceil(horizon / dt))
    y = _kernels.rk4_lti(a, x0, c, dt, n_steps)
    t = dt * np.arange(n_steps + 1)
    return TimeSeries(t=t, y=y)
