"""Hot numeric kernels with numba-accelerated and pure-numpy variants.

The package spends nearly all of its runtime in two places: evaluating
rational-function magnitudes over large frequency grids (peak search and
verification grids of up to 10^6 points) and stepping fixed-step RK4 time
simulations (tens of thousands of small matrix-vector products that cannot
be vectorized over time).

Both variants of each kernel are importable for benchmarking
(``*_numba`` / ``*_numpy``).  The module-level names (``gain_grid``,
``response_grid``, ``phase_slope_grid``, ``rk4_lti``) bind to the numba
versions unless the environment variable ``ROBINSTAB_NO_NUMBA`` is set to a
truthy value ("1", "true", "yes"), in which case the pure-numpy fallbacks
are used.  Results of the two paths agree to floating-point roundoff.
"""

import os

import numpy as np

__all__ = [
    "USING_NUMBA",
    "gain_grid",
    "response_grid",
    "phase_slope_grid",
    "rk4_lti",
]


def _numba_disabled() -> bool:
    return os.environ.get("ROBINSTAB_NO_NUMBA", "").strip().lower() in (
        "1",
        "true",
        "yes",
        "on",
    )


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def response_grid_numpy(num, den, omegas):
    """Complex frequency response num(jw)/den(jw) on an array of w."""
    s = 1j * np.asarray(omegas, dtype=np.float64)
    n = np.polynomial.polynomial.polyval(s, np.asarray(num, dtype=np.float64))
    d = np.polynomial.polynomial.polyval(s, np.asarray(den, dtype=np.float64))
    return n / d


def gain_grid_numpy(num, den, omegas):
    """|num(jw)/den(jw)| on an array of w."""
    return np.abs(response_grid_numpy(num, den, omegas))


def phase_slope_grid_numpy(num, dnum, den, dden, omegas):
    """d(arg num/den)/dw on an array of w via the logarithmic derivative.

    Requires the formal derivatives ``dnum``/``dden`` to be passed in so the
    kernel stays a pure array computation.
    """
    s = 1j * np.asarray(omegas, dtype=np.float64)
    pv = np.polynomial.polynomial.polyval
    n = pv(s, np.asarray(num, dtype=np.float64))
    d = pv(s, np.asarray(den, dtype=np.float64))
    dn = pv(s, np.asarray(dnum, dtype=np.float64))
    dd = pv(s, np.asarray(dden, dtype=np.float64))
    return (dn / n - dd / d).real


def rk4_lti_numpy(a_mat, x0, c_row, dt, n_steps):
    """Autonomous dx/dt = A x integrated with fixed-step RK4; returns y = c.x.

    Output has ``n_steps + 1`` samples including the initial state.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    a = np.asarray(a_mat, dtype=np.float64)
    c = np.asarray(c_row, dtype=np.float64)
    y = np.empty(n_steps + 1, dtype=np.float64)
    y[0] = c @ x
    for i in range(n_steps):
        k1 = a @ x
        k2 = a @ (x + 0.5 * dt * k1)
        k3 = a @ (x + 0.5 * dt * k2)
        k4 = a @ (x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        y[i + 1] = c @ x
    return y


# ---------------------------------------------------------------------------
# numba implementations (loop form)
# ---------------------------------------------------------------------------

def _response_grid_loops(num, den, omegas):
    out = np.empty(omegas.shape[0], dtype=np.complex128)
    for i in range(omegas.shape[0]):
        s = 1j * omegas[i]
        n = 0.0 + 0.0j
        for k in range(num.shape[0] - 1, -1, -1):
            n = n * s + num[k]
        d = 0.0 + 0.0j
        for k in range(den.shape[0] - 1, -1, -1):
            d = d * s + den[k]
        out[i] = n / d
    return out


def _gain_grid_loops(num, den, omegas):
    out = np.empty(omegas.shape[0], dtype=np.float64)
    for i in range(omegas.shape[0]):
        s = 1j * omegas[i]
        n = 0.0 + 0.0j
        for k in range(num.shape[0] - 1, -1, -1):
            n = n * s + num[k]
        d = 0.0 + 0.0j
        for k in range(den.shape[0] - 1, -1, -1):
            d = d * s + den[k]
        out[i] = abs(n / d)
    return out


def _phase_slope_grid_loops(num, dnum, den, dden, omegas):
    out = np.empty(omegas.shape[0], dtype=np.float64)
    for i in range(omegas.shape[0]):
        s = 1j * omegas[i]
        n = 0.0 + 0.0j
        for k in range(num.shape[0] - 1, -1, -1):
            n = n * s + num[k]
        d = 0.0 + 0.0j
        for k in range(den.shape[0] - 1, -1, -1):
            d = d * s + den[k]
        dn = 0.0 + 0.0j
        for k in range(dnum.shape[0] - 1, -1, -1):
            dn = dn * s + dnum[k]
        dd = 0.0 + 0.0j
        for k in range(dden.shape[0] - 1, -1, -1):
            dd = dd * s + dden[k]
        out[i] = (dn / n - dd / d).real
    return out


def _rk4_lti_loops(a_mat, x0, c_row, dt, n_steps):
    n = x0.shape[0]
    x = x0.copy()
    k1 = np.empty(n, dtype=np.float64)
    k2 = np.empty(n, dtype=np.float64)
    k3 = np.empty(n, dtype=np.float64)
    k4 = np.empty(n, dtype=np.float64)
    tmp = np.empty(n, dtype=np.float64)
    y = np.empty(n_steps + 1, dtype=np.float64)
    acc = 0.0
    for j in range(n):
        acc += c_row[j] * x[j]
    y[0] = acc
    for i in range(n_steps):
        for r in range(n):
            v = 0.0
            for j in range(n):
                v += a_mat[r, j] * x[j]
            k1[r] = v
        for j in range(n):
            tmp[j] = x[j] + 0.5 * dt * k1[j]
        for r in range(n):
            v = 0.0
            for j in range(n):
                v += a_mat[r, j] * tmp[j]
            k2[r] = v
        for j in range(n):
            tmp[j] = x[j] + 0.5 * dt * k2[j]
        for r in range(n):
            v = 0.0
            for j in range(n):
                v += a_mat[r, j] * tmp[j]
            k3[r] = v
        for j in range(n):
            tmp[j] = x[j] + dt * k3[j]
        for r in range(n):
            v = 0.0
            for j in range(n):
                v += a_mat[r, j] * tmp[j]
            k4[r] = v
        for j in range(n):
            x[j] = x[j] + (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        acc = 0.0
        for j in range(n):
            acc += c_row[j] * x[j]
        y[i + 1] = acc
    return y


USING_NUMBA = not _numba_disabled()

if USING_NUMBA:
    from numba import njit

    response_grid_numba = njit(cache=True)(_response_grid_loops)
    gain_grid_numba = njit(cache=True)(_gain_grid_loops)
    phase_slope_grid_numba = njit(cache=True)(_phase_slope_grid_loops)
    rk4_lti_numba = njit(cache=True)(_rk4_lti_loops)

    def response_grid(num, den, omegas):
        return response_grid_numba(
            np.ascontiguousarray(num, dtype=np.float64),
            np.ascontiguousarray(den, dtype=np.float64),
            np.ascontiguousarray(omegas, dtype=np.float64),
        )

    def gain_grid(num, den, omegas):
        return gain_grid_numba(
            np.ascontiguousarray(num, dtype=np.float64),
            np.ascontiguousarray(den, dtype=np.float64),
            np.ascontiguousarray(omegas, dtype=np.float64),
        )

    def phase_slope_grid(num, dnum, den, dden, omegas):
        return phase_slope_grid_numba(
            np.ascontiguousarray(num, dtype=np.float64),
            np.ascontiguousarray(dnum, dtype=np.float64),
            np.ascontiguousarray(den, dtype=np.float64),
            np.ascontiguousarray(dden, dtype=np.float64),
            np.ascontiguousarray(omegas, dtype=np.float64),
        )

    def rk4_lti(a_mat, x0, c_row, dt, n_steps):
        return rk4_lti_numba(
            np.ascontiguousarray(a_mat, dtype=np.float64),
            np.ascontiguousarray(x0, dtype=np.float64),
            np.ascontiguousarray(c_row, dtype=np.float64),
            float(dt),
            int(n_steps),
        )

else:
    response_grid = response_grid_numpy
    gain_grid = gain_grid_numpy
    phase_slope_grid = phase_slope_grid_numpy
    rk4_lti = rk4_lti_numpy
