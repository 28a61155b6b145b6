"""Floquet discriminant Delta(lambda) and band edges as roots of Delta = +-2.

This is the independent cross-check of the Galerkin solver: edges come from
integrating -u'' + q u = lambda u over one period (or from the exact
Kronig-Penney transfer matrix for the delta comb), never from a matrix
eigenproblem.

Band edge location exploits the shape of Delta: it is strictly monotone on
every band and has exactly one critical point per gap.  After lambda_0, the
n-th critical point is a minimum near -2 (n odd) or a maximum near +2
(n even); the two edges are the roots of Delta = +-2 on either side of it, or
a double root when the extremum only touches +-2 (a collapsed gap).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import bisect, minimize_scalar

from .galerkin import SpectrumError, SpectrumResult, check_interlacing
from .potential import FourierPotential, PotentialError

TANGENCY_TOL = 1e-12
# an extremum this far inside [-2, 2] cannot be a gap: the scan lost track
BAND_SLACK = 1e-6
SCAN_STEP = np.pi / 64


class WronskianError(SpectrumError):
    pass


class StepSizeError(SpectrumError):
    pass


@dataclass
class DiscriminantTrace:
    lambda_grid: np.ndarray
    delta_values: np.ndarray
    brackets: list = field(default_factory=list)

    def records(self):
        return [{"lambda": float(l), "delta": float(d)}
                for l, d in zip(self.lambda_grid, self.delta_values)]


def _pointwise(q: FourierPotential):
    if q.support is None:
        raise PotentialError("the ODE discriminant needs a finitely supported potential")
    ks = np.arange(1, q.support + 1)
    c = q.coeff(ks) if len(ks) else np.zeros(0, dtype=complex)
    keep = c != 0
    ks, c = ks[keep] * 2.0 * np.pi, 2.0 * c[keep]
    q0 = q.coeff(0).real

    def qx(x):
        return q0 + float(np.sum((c * np.exp(1j * ks * x)).real))

    return qx


def monodromy_matrix(q: FourierPotential, lam: float, rk_tol: float = 1e-10) -> np.ndarray:
    """Period map of (u, u') for -u'' + q u = lam u, columns from (1,0) and (0,1)."""
    qx = _pointwise(q)

    def rhs(x, y):
        a = qx(x) - lam
        return [y[1], a * y[0], y[3], a * y[2]]

    # a decade of headroom so that Delta itself, not just each step, meets rk_tol
    tol = 0.1 * rk_tol
    sol = solve_ivp(rhs, (0.0, 1.0), [1.0, 0.0, 0.0, 1.0], method="DOP853",
                    rtol=tol, atol=tol)
    if sol.status != 0:
        raise StepSizeError(f"integration failed at lambda={lam!r}: {sol.message}")
    u1, du1, u2, du2 = sol.y[:, -1]
    return np.array([[u1, u2], [du1, du2]])


def monodromy_trace(q: FourierPotential, lam: float, rk_tol: float = 1e-10) -> float:
    """Delta(lam) = u1(1) + u2'(1), after rescaling M to unit determinant.

    Integration error mostly shows up as a common scale factor on M, which
    det(M) = 1 lets us remove; near narrow gaps M is close to +-I and the
    rescaled trace is then accurate to second order in the local error.
    """
    M = monodromy_matrix(q, lam, rk_tol)
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if not abs(det - 1.0) <= 10.0 * rk_tol:
        raise WronskianError(f"monodromy determinant {det!r} at lambda={lam!r}")
    return float((M[0, 0] + M[1, 1]) / np.sqrt(det))


def delta_comb_trace(alpha: float, lam: float) -> float:
    """Exact discriminant of -u'' + alpha sum_j delta(x - j) u = lam u."""
    if lam > 0:
        k = np.sqrt(lam)
        return float(2.0 * np.cos(k) + alpha * np.sinc(k / np.pi))
    if lam == 0:
        return 2.0 + alpha
    s = np.sqrt(-lam)
    shc = 1.0 + s * s / 6.0 + s ** 4 / 120.0 if s < 1e-3 else np.sinh(s) / s
    return float(2.0 * np.cosh(s) + alpha * shc)


def free_trace(lam: float) -> float:
    return delta_comb_trace(0.0, lam)


def _find_lower_start(trace_fn, start=-1.0, max_iter=60):
    """A point below lambda_0: Delta > 2 and still growing as lambda decreases."""
    lam, step = start, 1.0
    d = trace_fn(lam)
    for _ in range(max_iter):
        below = lam - step
        d_below = trace_fn(below)
        if d > 2.0 and d_below > d:
            return lam, d
        lam, d = below, d_below
        step *= 2.0
    raise SpectrumError("could not find a point below the ground state")


def _critical_point(trace_fn, sigma, lo, hi, root_tol):
    """Location of the extremum of Delta in (lo, hi).

    Bisects the symmetric difference Delta(x + h) - Delta(x - h), which has
    a simple root there; maximizing Delta directly would stall at
    sqrt(eps / Delta'') because the peak is quadratically flat.  For
    lambda > 0 the difference is taken in k = sqrt(lambda), where Delta is
    close to 2 cos k and hence nearly even about the critical point.
    """
    if lo > 0:
        k_lo, k_hi = np.sqrt(lo), np.sqrt(hi)
        h = min(1e-4, 0.25 * (k_hi - k_lo))

        def slope(k):
            return sigma * (trace_fn((k + h) ** 2) - trace_fn((k - h) ** 2))

        a, b = k_lo + h, k_hi - h
        if slope(a) > 0 > slope(b):
            k_tol = root_tol / (2.0 * k_hi)
            return float(bisect(slope, a, b, xtol=k_tol) ** 2)
    else:
        h = min(1e-4, 0.25 * (hi - lo))

        def slope(x):
            return sigma * (trace_fn(x + h) - trace_fn(x - h))

        a, b = lo + h, hi - h
        if slope(a) > 0 > slope(b):
            return float(bisect(slope, a, b, xtol=root_tol))
    opt = minimize_scalar(lambda x: -sigma * trace_fn(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": root_tol})
    return float(opt.x)


def _hidden_halfwidth(trace_fn, sigma, lam_c, tangency_tol):
    """Half-width of the widest gap whose extremum stays within tangency_tol of +-2.

    Near the extremum sigma*Delta ~ peak - a/2 (lam - lam_c)^2, so a gap is
    invisible to the tangency test when its half-width is below sqrt(2 tol / a).
    """
    H = 1e-3 * max(1.0, np.sqrt(abs(lam_c)))
    a = sigma * (2.0 * trace_fn(lam_c) - trace_fn(lam_c + H) - trace_fn(lam_c - H)) / H ** 2
    if not a > 0:
        return 0.0
    return float(np.sqrt(2.0 * tangency_tol / a))


class _Scanner:
    """Lazily sampled Delta on lambda = lam_lo + t^2, t on a uniform grid."""

    def __init__(self, trace_fn, lam_lo, d_lo, dt):
        self.fn = trace_fn
        self.lam_lo = lam_lo
        self.dt = dt
        self.lams = [lam_lo]
        self.vals = [d_lo]

    def extend(self, count):
        i0 = len(self.lams)
        for i in range(i0, i0 + count):
            lam = self.lam_lo + (i * self.dt) ** 2
            self.lams.append(lam)
            self.vals.append(self.fn(lam))


def _locate(trace_fn, n_max, root_tol, tangency_tol, dt, lam_lo, d_lo, t_cap):
    sc = _Scanner(trace_fn, lam_lo, d_lo, dt)
    sc.extend(64)
    brackets = []

    # lambda_0: first downcrossing of Delta = 2
    i = 1
    while True:
        while i >= len(sc.vals):
            sc.extend(64)
        if sc.vals[i] <= 2.0:
            break
        i += 1
        if i * dt > t_cap:
            raise SpectrumError("no ground state found in the scanned range")
    a, b = sc.lams[i - 1], sc.lams[i]
    lam0 = bisect(lambda x: trace_fn(x) - 2.0, a, b, xtol=root_tol) if sc.vals[i] < 2.0 else b
    brackets.append((a, b))

    pairs, errs = [], [root_tol]
    j = i
    for n in range(1, n_max + 1):
        sigma = -1.0 if n % 2 else 1.0
        # walk to the next critical point; the samples must keep moving towards sigma*2
        while True:
            while j + 1 >= len(sc.vals):
                sc.extend(64)
                if len(sc.vals) * dt > t_cap:
                    raise SpectrumError(f"gap {n} not found below the scan cap")
            d_prev, d_cur, d_next = sc.vals[j - 1], sc.vals[j], sc.vals[j + 1]
            if sigma * (d_cur - d_prev) >= 0 and sigma * (d_next - d_cur) < 0:
                break
            if sigma * (d_cur - d_prev) < 0:
                raise SpectrumError(f"critical point of the wrong type before gap {n}")
            j += 1
        lo, hi = sc.lams[j - 1], sc.lams[j + 1]
        lam_c = _critical_point(trace_fn, sigma, lo, hi, root_tol)
        peak = sigma * trace_fn(lam_c)
        if sigma * d_cur > peak:
            lam_c, peak = sc.lams[j], sigma * d_cur
        if peak < 2.0 - BAND_SLACK:
            raise SpectrumError(f"extremum for gap {n} lies inside a band (|Delta| = {peak!r})")
        if peak - 2.0 <= tangency_tol:
            pairs.append((lam_c, lam_c))
            errs.append(_hidden_halfwidth(trace_fn, sigma, lam_c, tangency_tol))
            brackets.append((lo, hi))
        else:
            g = lambda x: sigma * trace_fn(x) - 2.0
            # nearest samples outside the gap on each side
            left = j - 1
            while left > 0 and sigma * sc.vals[left] - 2.0 >= 0:
                left -= 1
            right = j + 1
            while sigma * sc.vals[right] - 2.0 >= 0:
                right += 1
                while right >= len(sc.vals):
                    sc.extend(64)
            a_lo, b_hi = sc.lams[left], sc.lams[right]
            r_minus = bisect(g, a_lo, lam_c, xtol=root_tol)
            r_plus = bisect(g, lam_c, b_hi, xtol=root_tol)
            pairs.append((r_minus, r_plus))
            errs.append(root_tol)
            brackets.extend([(a_lo, lam_c), (lam_c, b_hi)])
        j += 1
    return lam0, np.array(pairs, dtype=float).reshape(n_max, 2), np.maximum(errs, root_tol), sc, brackets


def band_edges_from_trace(trace_fn: Callable[[float], float], n_max: int,
                          root_tol: float = 1e-9, tangency_tol: float = TANGENCY_TOL,
                          return_trace: bool = False):
    """Band edges lambda_0, (lambda_n^-, lambda_n^+) for n <= n_max from Delta."""
    if n_max < 1 or root_tol <= 0:
        raise ValueError("need n_max >= 1 and root_tol > 0")
    lam_lo, d_lo = _find_lower_start(trace_fn)
    t_cap = (n_max + 8) * np.pi + np.sqrt(abs(lam_lo)) + 2 * np.pi * np.sqrt(n_max)
    last_exc = None
    for dt in (SCAN_STEP, SCAN_STEP / 4):
        try:
            lam0, pairs, err, sc, brackets = _locate(trace_fn, n_max, root_tol, tangency_tol,
                                                     dt, lam_lo, d_lo, t_cap)
            res = SpectrumResult(float(lam0), pairs, err,
                                 {"scan_step": dt}, method="discriminant")
            check_interlacing(res)
            break
        except SpectrumError as exc:
            last_exc = exc
    else:
        raise SpectrumError(f"band edge search failed after grid refinement: {last_exc}")
    if return_trace:
        return res, DiscriminantTrace(np.array(sc.lams), np.array(sc.vals), brackets)
    return res


def sample_trace(trace_fn, lam_lo: float, lam_hi: float, num: int = 401) -> DiscriminantTrace:
    grid = np.linspace(lam_lo, lam_hi, num)
    vals = np.array([trace_fn(l) for l in grid])
    brackets = []
    for level in (2.0, -2.0):
        s = np.sign(vals - level)
        for i in np.flatnonzero(s[:-1] * s[1:] < 0):
            brackets.append((float(grid[i]), float(grid[i + 1])))
    return DiscriminantTrace(grid, vals, sorted(brackets))


def potential_trace_fn(q: FourierPotential, rk_tol: float = 1e-10):
    """Pick the trace for q: closed form for a delta comb, ODE for trig polynomials."""
    if q.name == "delta-comb" and len(q.params) == 1:
        alpha = q.params[0]
        return lambda lam: delta_comb_trace(alpha, lam)
    _pointwise(q)
    return lambda lam: monodromy_trace(q, lam, rk_tol)
