"""Shared oracles for the test suite.

These deliberately avoid the production code paths they are used to check:
peak locations come from the real roots of the derivative of the squared
gain (a polynomial identity), phase slopes from central finite differences,
and polynomial values from the naive power sum.
"""

import numpy as np

_P = np.polynomial.polynomial


def naive_eval(coeffs, s):
    """Power-sum polynomial evaluation (no Horner)."""
    return sum(c * s**k for k, c in enumerate(np.asarray(coeffs)))


def _abs2_poly(c):
    """|p(jw)|^2 as a real polynomial in w."""
    c = np.asarray(c, dtype=float)
    re = np.zeros(c.size)
    im = np.zeros(c.size)
    for k, ck in enumerate(c):
        quarter = k % 4
        if quarter == 0:
            re[k] = ck
        elif quarter == 1:
            im[k] = ck
        elif quarter == 2:
            re[k] = -ck
        else:
            im[k] = -ck
    return _P.polyadd(_P.polymul(re, re), _P.polymul(im, im))


def oracle_peaks(num, den):
    """All positive-frequency local maxima of |num(jw)/den(jw)|.

    Solves d/dw |g|^2 = 0 exactly as a polynomial equation and filters the
    real positive roots down to maxima.  Returns [(w, gain, phase)] sorted
    by gain, descending.
    """
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    pn = _abs2_poly(num)
    qd = _abs2_poly(den)
    h = _P.polysub(_P.polymul(_P.polyder(pn), qd), _P.polymul(pn, _P.polyder(qd)))
    h = np.trim_zeros(h, "b")
    roots = np.roots(h[::-1]) if h.size > 1 else np.empty(0)

    def resp(w):
        s = 1j * w
        return _P.polyval(s, num) / _P.polyval(s, den)

    out = []
    for r in roots:
        if abs(r.imag) > 1e-7 or r.real <= 1e-10:
            continue
        w = float(r.real)
        eps = 1e-6 * max(1.0, w)
        gain = abs(resp(w))
        if gain >= abs(resp(w - eps)) and gain >= abs(resp(w + eps)):
            out.append((w, gain, float(np.angle(resp(w)))))
    dedup = []
    for w, gain, phase in sorted(out):
        if dedup and abs(w - dedup[-1][0]) < 1e-9 * max(1.0, w):
            continue
        dedup.append((w, gain, phase))
    return sorted(dedup, key=lambda t: -t[1])


def fd_phase_slope(g, w, h=1e-6):
    """Central finite difference of the (locally unwrapped) phase of g."""
    lo = np.angle(g.response(w - h))
    hi = np.angle(g.response(w + h))
    diff = hi - lo
    if diff > np.pi:
        diff -= 2 * np.pi
    elif diff < -np.pi:
        diff += 2 * np.pi
    return diff / (2 * h)


def modal_output(a_mat, x0, c_row, t):
    """y(t) = c exp(At) x0 via eigendecomposition (diagonalizable A only)."""
    lam, v = np.linalg.eig(a_mat)
    alpha = np.linalg.solve(v, x0.astype(complex))
    modes = (v.T @ c_row) * alpha  # residue of each mode in the output
    t = np.asarray(t)
    return np.real(np.exp(np.outer(t, lam)) @ modes)


def random_stable_polynomial(rng, n_real, n_pairs):
    """Product of (s+a), a>0, and (s^2 + 2*z*w*s + w^2), z, w > 0."""
    c = np.array([1.0])
    for _ in range(n_real):
        a = rng.uniform(0.1, 5.0)
        c = _P.polymul(c, [a, 1.0])
    for _ in range(n_pairs):
        z = rng.uniform(0.05, 1.5)
        w = rng.uniform(0.1, 5.0)
        c = _P.polymul(c, [w * w, 2 * z * w, 1.0])
    return c
