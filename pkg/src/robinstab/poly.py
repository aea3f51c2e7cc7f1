"""Real polynomial arithmetic, root finding, and the Routh-Hurwitz test.

Coefficients are stored lowest degree first throughout the package, so
``Polynomial([21, 3, 3, 1])`` is ``s^3 + 3s^2 + 3s + 21``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

_P = np.polynomial.polynomial

#: Relative half-width of the band around the imaginary axis inside which a
#: root is classified as on-axis: |Re(r)| <= ON_AXIS_REL_TOL * max(1, |r|).
ON_AXIS_REL_TOL = 1e-7

#: Two axis roots closer than this (relative) are treated as a repeated
#: axis root, which disqualifies marginal stability.
_AXIS_SEP_REL_TOL = 1e-6

#: Routh table entries below this (relative to the feeding rows) count as
#: structural zeros and make the table degenerate.
_ROUTH_ZERO_REL_TOL = 1e-12


class Polynomial:
    """Immutable real polynomial, canonical trimmed form.

    The zero polynomial is represented by the single coefficient 0.0 and has
    degree -inf.  The leading coefficient of any nonzero polynomial is
    nonzero after trimming.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=np.float64))
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        c = np.array(c, dtype=np.float64)
        c.setflags(write=False)
        self._c = c

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        """Expand prod (s - r_i) * leading; complex roots must pair up."""
        c = np.atleast_1d(_P.polyfromroots(np.asarray(roots, dtype=complex)))
        if np.max(np.abs(c.imag)) > 1e-9 * max(1.0, np.max(np.abs(c))):
            raise ValueError("roots do not form a real polynomial")
        return cls(c.real * leading)

    @property
    def coeffs(self):
        return self._c

    @property
    def degree(self):
        if self._c.size == 1 and self._c[0] == 0.0:
            return float("-inf")
        return self._c.size - 1

    @property
    def is_zero(self):
        return self._c.size == 1 and self._c[0] == 0.0

    @property
    def leading(self):
        return float(self._c[-1])

    def __call__(self, s):
        """Horner evaluation at a (possibly complex) point or array."""
        return _P.polyval(s, self._c)

    def __add__(self, other):
        other = _coerce(other)
        return Polynomial(_P.polyadd(self._c, other._c))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Polynomial(_P.polysub(self._c, other._c))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return Polynomial(_P.polymul(self._c, other._c))

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(-self._c)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"Polynomial({self._c.tolist()})"

    def allclose(self, other, rtol=1e-12, atol=0.0):
        a, b = self._c, other._c
        n = max(a.size, b.size)
        a = np.pad(a, (0, n - a.size))
        b = np.pad(b, (0, n - b.size))
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
        return bool(np.all(np.abs(a - b) <= atol + rtol * scale))

    def derivative(self):
        """Formal derivative; the zero polynomial for constants."""
        if self._c.size == 1:
            return Polynomial([0.0])
        return Polynomial(_P.polyder(self._c))

    def roots(self):
        """All complex roots with multiplicity.

        Computed from the companion-matrix eigenvalues with one Newton polish
        step per root.  Roots of real polynomials are returned in exact
        conjugate pairs.  Residuals |p(r)| stay below ~1e-8 * max|coeff| *
        max(1,|r|)^deg for the degrees handled here (<= ~45).

        Raises ValueError for constants and the zero polynomial.
        """
        if self.degree < 1:
            raise ValueError("no roots defined for a constant or zero polynomial")
        c = self._c
        n_zero = 0
        while c[n_zero] == 0.0:
            n_zero += 1
        core = c[n_zero:]
        deg = core.size - 1
        if deg == 0:
            r = np.empty(0, dtype=complex)
        else:
            monic = core / core[-1]
            comp = np.zeros((deg, deg))
            if deg > 1:
                comp[1:, :-1] = np.eye(deg - 1)
            comp[:, -1] = -monic[:-1]
            r = np.linalg.eigvals(comp)
            dcore = _P.polyder(core)
            pv = _P.polyval(r, core)
            dv = _P.polyval(r, dcore)
            ok = np.abs(dv) > 1e-300
            step = np.zeros_like(r)
            step[ok] = pv[ok] / dv[ok]
            polished = r - step
            # keep the polish only where it actually reduced the residual
            better = np.abs(_P.polyval(polished, core)) <= np.abs(pv)
            r = np.where(better, polished, r)
            r = _pair_conjugates(r)
        if n_zero:
            r = np.concatenate([np.zeros(n_zero, dtype=complex), r])
        return r


def _coerce(x):
    if isinstance(x, Polynomial):
        return x
    if np.isscalar(x):
        return Polynomial([float(x)])
    return Polynomial(x)


def _pair_conjugates(r):
    """Snap numerically conjugate root pairs to exact conjugates."""
    r = np.array(r, dtype=complex)
    real_mask = np.abs(r.imag) <= 1e-12 * (1.0 + np.abs(r))
    r[real_mask] = r[real_mask].real
    idx = [i for i in range(r.size) if not real_mask[i]]
    used = set()
    for i in idx:
        if i in used:
            continue
        best, best_d = None, None
        for j in idx:
            if j == i or j in used:
                continue
            d = abs(r[i] - np.conj(r[j]))
            if best_d is None or d < best_d:
                best, best_d = j, d
        if best is None:
            continue
        used.add(i)
        used.add(best)
        mean = 0.5 * (r[i] + np.conj(r[best]))
        r[i] = mean
        r[best] = np.conj(mean)
    return r


class StabilityKind(Enum):
    STABLE = "Stable"
    MARGINALLY_STABLE = "MarginallyStable"
    UNSTABLE = "Unstable"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of a stability test.

    ``unstable_count`` counts ORHP roots with multiplicity.
    ``imaginary_axis_roots`` holds the nonnegative frequencies of axis roots
    (one entry per conjugate pair, 0.0 for a root at the origin).  Both
    fields are meaningless when ``kind`` is DEGENERATE.
    """

    kind: StabilityKind
    unstable_count: int = 0
    imaginary_axis_roots: tuple = ()


def routh_hurwitz(p: Polynomial) -> StabilityVerdict:
    """Routh-Hurwitz stability test.

    Stable iff every first-column entry of the Routh table has the sign of
    the leading coefficient; otherwise Unstable with ``unstable_count`` equal
    to the number of first-column sign changes.

    An all-zero row is continued exactly with the derivative of the auxiliary
    polynomial (the classical rule for root sets symmetric about the origin;
    no epsilon perturbation).  Sign changes then still count ORHP roots, but
    a table that needed continuation and shows no sign change cannot
    distinguish stable from marginally stable, so it returns DEGENERATE, as
    does a (near-)zero first-column entry in a nonzero row; callers fall
    back to root finding.
    """
    if p.is_zero:
        raise ValueError("zero polynomial has no stability character")
    if p.degree < 1:
        raise ValueError("degree must be at least 1")
    c = p.coeffs[::-1]  # descending
    n = c.size - 1
    width = (n + 2) // 2
    row0 = np.zeros(width)
    row1 = np.zeros(width)
    row0[: (n + 2) // 2] = c[0::2]
    row1[: (n + 1) // 2] = c[1::2]
    first_col = [row0[0]]
    prev2, prev = row0, row1
    power = n - 1  # s-power of the `prev` row
    had_zero_row = False
    for _ in range(n):
        scale = max(np.max(np.abs(prev)), np.max(np.abs(prev2)))
        if np.all(np.abs(prev) <= _ROUTH_ZERO_REL_TOL * scale):
            had_zero_row = True
            aux_power = power + 1
            prev = np.array(
                [prev2[j] * (aux_power - 2 * j) for j in range(width)]
            )
            scale = max(np.max(np.abs(prev)), np.max(np.abs(prev2)))
        if abs(prev[0]) <= _ROUTH_ZERO_REL_TOL * scale:
            return StabilityVerdict(kind=StabilityKind.DEGENERATE)
        first_col.append(prev[0])
        if power == 0:
            break
        new = np.zeros(width)
        for j in range(width - 1):
            new[j] = (prev[0] * prev2[j + 1] - prev2[0] * prev[j + 1]) / prev[0]
        prev2, prev = prev, new
        power -= 1
    signs = np.sign(first_col)
    changes = int(np.sum(signs[1:] != signs[:-1]))
    if changes > 0:
        return StabilityVerdict(kind=StabilityKind.UNSTABLE, unstable_count=changes)
    if had_zero_row:
        # symmetric root group with no ORHP member: roots sit on the axis
        return StabilityVerdict(kind=StabilityKind.DEGENERATE)
    return StabilityVerdict(kind=StabilityKind.STABLE)


def stability_from_roots(roots, rel_tol=ON_AXIS_REL_TOL) -> StabilityVerdict:
    """Classify a root set into Stable / MarginallyStable / Unstable.

    A root is on-axis when |Re| <= rel_tol * max(1, |root|).  Marginal
    stability additionally requires every axis root to be simple (no two
    axis roots closer than a small relative separation).
    """
    roots = np.asarray(roots, dtype=complex)
    scale = np.maximum(1.0, np.abs(roots))
    on_axis = np.abs(roots.real) <= rel_tol * scale
    unstable = roots.real > rel_tol * scale
    n_unstable = int(np.sum(unstable))
    axis_roots = roots[on_axis]
    if n_unstable > 0:
        freqs = _axis_frequencies(axis_roots)
        return StabilityVerdict(StabilityKind.UNSTABLE, n_unstable, freqs)
    if axis_roots.size == 0:
        return StabilityVerdict(StabilityKind.STABLE)
    for i in range(axis_roots.size):
        for j in range(i + 1, axis_roots.size):
            sep = abs(axis_roots[i] - axis_roots[j])
            if sep <= _AXIS_SEP_REL_TOL * max(1.0, abs(axis_roots[i])):
                # repeated axis root: polynomial growth, not marginal
                return StabilityVerdict(
                    StabilityKind.UNSTABLE, 0, _axis_frequencies(axis_roots)
                )
    return StabilityVerdict(
        StabilityKind.MARGINALLY_STABLE, 0, _axis_frequencies(axis_roots)
    )


def _axis_frequencies(axis_roots):
    freqs = sorted(float(abs(r.imag)) for r in axis_roots if r.imag >= 0.0)
    return tuple(freqs)
