"""Gap-sequence analytics: weighted norms, remainders, decay fits.

Everything here turns statements about sequence classes (membership of
{gamma(n)} in h^w, the size of gamma(n) - 2|qhat(n)|) into finite numbers
that can be compared: partial norms up to a cutoff and least-squares decay
exponents on a log-log scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import galerkin
from .discriminant import band_edges_from_trace, delta_comb_trace
from .galerkin import GapSequence, SpectrumError, gaps
from .potential import FourierPotential, hormander_norm_partial, truncate
from .weights import Weight, domination_constant

__all__ = [
    "GapSequence", "gaps", "DecayFitError", "DecayFit", "weighted_norm_partial",
    "remainder", "decay_fit", "regularity_estimate", "EquivalenceReport",
    "equivalence_check", "EmbeddingResult", "embedding_check", "smoothing_convergence",
    "SmoothingTable", "predicted_remainder_gain", "asymptotics", "reference_gaps",
]

EQUIV_C = 10.0
EQUIV_N0 = 8


class DecayFitError(ValueError):
    """Too few entries above the noise floor to fit a power law."""


class ConvergenceError(RuntimeError):
    pass


def _values(a) -> np.ndarray:
    return np.asarray(a.gamma if isinstance(a, GapSequence) else a, dtype=float)


def weighted_norm_partial(a, w: Weight, n: int) -> float:
    """sqrt(sum_{k=1}^{n} w(k)^2 a(k)^2); a[0] holds a(1)."""
    vals = _values(a)
    if n > len(vals):
        raise ValueError(f"cutoff {n} beyond sequence length {len(vals)}")
    ks = np.arange(1, n + 1)
    return float(np.sqrt(np.sum(w(ks) ** 2 * vals[:n] ** 2)))


def remainder(q: FourierPotential, g: GapSequence) -> np.ndarray:
    """r(n) = gamma(n) - 2|qhat(n)|, signed."""
    ns = np.arange(1, len(g) + 1)
    return g.gamma - 2.0 * np.abs(q.coeff(ns))


@dataclass
class DecayFit:
    exponent: float
    r2: float
    used: int
    floor: float


def decay_fit(a, n_lo: int, n_hi: int, floor: float | None = None) -> DecayFit:
    """Fit a(n) ~ C n^-p on [n_lo, n_hi] by least squares in log-log space.

    Entries at or below ``floor`` are dropped; for a GapSequence the floor
    defaults to its largest err_est on the range.
    """
    if n_hi < n_lo + 8:
        raise ValueError("need n_hi >= n_lo + 8")
    vals = np.abs(_values(a))
    if n_hi > len(vals) or n_lo < 1:
        raise ValueError(f"range [{n_lo}, {n_hi}] outside the sequence")
    if floor is None:
        floor = float(np.max(a.err_est[n_lo - 1:n_hi])) if isinstance(a, GapSequence) else 0.0
    ns = np.arange(n_lo, n_hi + 1)
    y = vals[n_lo - 1:n_hi]
    keep = y > floor
    if 2 * keep.sum() <= len(ns) or keep.sum() < 3:
        raise DecayFitError(f"only {int(keep.sum())} of {len(ns)} entries exceed the floor {floor:g}")
    x, ly = np.log(ns[keep]), np.log(y[keep])
    slope, icpt = np.polyfit(x, ly, 1)
    resid = ly - (slope * x + icpt)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot <= 1e-28 * len(ly) else 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return DecayFit(float(-slope), float(r2), int(keep.sum()), float(floor))


def regularity_estimate(g, n_lo: int = 8, n_hi: int | None = None) -> float:
    """Critical Sobolev index p - 1/2 from the fitted decay exponent p."""
    n_hi = len(_values(g)) if n_hi is None else n_hi
    return decay_fit(g, n_lo, n_hi).exponent - 0.5


def predicted_remainder_gain(s: float, delta: float = 0.1) -> float:
    """Extra decay of gamma(n) - 2|qhat(n)| over qhat(n) for q in H^s.

    s >= 0: the remainder sits in h^(1+s), one power better than qhat;
    -1 < s < 0: h^(1+2s-delta), a gain of 1+s-delta; s = -1: no gain.
    """
    if s >= 0:
        return 1.0
    if s > -1:
        return 1.0 + s - delta
    return 0.0


def asymptotics(q: FourierPotential, g: GapSequence, n_lo: int, n_hi: int,
                s: float | None = None, margin: float = 0.7) -> dict:
    """Fitted exponents of gamma and |remainder| plus the gain verdict."""
    r = remainder(q, g)
    fit_g = decay_fit(g, n_lo, n_hi)
    floor = float(np.max(g.err_est[n_lo - 1:n_hi]))
    fit_r = decay_fit(np.abs(r), n_lo, n_hi, floor=floor)
    if s is None:
        s = fit_g.exponent - 0.5
    need = margin * predicted_remainder_gain(s)
    gain = fit_r.exponent - fit_g.exponent
    return {"gamma_exponent": fit_g.exponent, "gamma_r2": fit_g.r2,
            "remainder_exponent": fit_r.exponent, "remainder_r2": fit_r.r2,
            "s": s, "gain": gain, "required_gain": need, "consistent": bool(gain >= need),
            "remainder": r}


def _divergence_status(terms: np.ndarray, n_lo: int, n_hi: int) -> str:
    """'convergent' / 'divergent' trend of sum(terms) from the decay of terms."""
    if not np.any(terms[n_lo - 1:n_hi] > 0):
        return "zero"
    try:
        p = decay_fit(terms, n_lo, n_hi).exponent
    except DecayFitError:
        return "undetermined"
    return "convergent" if p > 1.0 else "divergent"


@dataclass
class EquivalenceReport:
    weight: str
    cutoffs: np.ndarray
    norm_q: np.ndarray
    norm_gamma: np.ndarray
    ratio: np.ndarray
    r_min: float
    r_max: float
    C: float
    verdict: str
    offending_cutoff: int | None = None
    q_status: str = ""
    gamma_status: str = ""
    note: str = ("norm equivalence constants are not known; the band [1/C, C] "
                 "is a convention")

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"

    def records(self):
        return [{"cutoff": int(n), "norm_q": float(a), "norm_gamma": float(b), "ratio": float(r)}
                for n, a, b, r in zip(self.cutoffs, self.norm_q, self.norm_gamma, self.ratio)]


def equivalence_check(q: FourierPotential, w: Weight, n_max: int, tol: float = EQUIV_C,
                      g: GapSequence | None = None, n0: int = EQUIV_N0,
                      gap_tol: float = 1e-10) -> EquivalenceReport:
    """Compare partial H^w norms of q with partial h^w norms of its gaps.

    ``tol`` is the ratio-band constant C: consistent iff every ratio
    ||gamma||_n / ||q||_n over cutoffs n0..n_max lies in [1/C, C].
    """
    if g is None:
        g = gaps(galerkin.band_edges(q, n_max, tol=gap_tol))
    cutoffs = np.arange(n0, n_max + 1)
    nq = np.array([hormander_norm_partial(q, w, n) for n in cutoffs])
    ng = np.array([weighted_norm_partial(g, w, n) for n in cutoffs])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where((nq == 0) & (ng == 0), 1.0, ng / nq)
    C = float(tol)
    bad = np.flatnonzero(~((ratio >= 1.0 / C) & (ratio <= C)))
    ns = np.arange(1, n_max + 1)
    wq = w(ns) ** 2 * (np.abs(q.coeff(ns)) ** 2 + np.abs(q.coeff(-ns)) ** 2)
    wg = w(ns) ** 2 * g.gamma[:n_max] ** 2
    lo = min(n0, max(1, n_max - 8))
    return EquivalenceReport(
        weight=str(w), cutoffs=cutoffs, norm_q=nq, norm_gamma=ng, ratio=ratio,
        r_min=float(np.min(ratio)), r_max=float(np.max(ratio)), C=C,
        verdict="inconsistent" if bad.size else "consistent",
        offending_cutoff=int(cutoffs[bad[0]]) if bad.size else None,
        q_status=_divergence_status(wq, lo, n_max),
        gamma_status=_divergence_status(wg, lo, n_max))


@dataclass
class EmbeddingResult:
    applicable: bool
    passed: bool | None
    c: float | None
    worst_cutoff: int | None = None

    def __bool__(self):
        return bool(self.passed)


def embedding_check(w1: Weight, w2: Weight, a, n_max: int) -> EmbeddingResult:
    """||a||_{h^w2, n} <= (1/c) ||a||_{h^w1, n} for all n <= n_max, with c = min w1/w2.

    Inapplicable (passed=None) when w1 does not dominate w2 on the range, i.e.
    when w1/w2 keeps shrinking instead of staying bounded below.
    """
    ks = np.arange(1, n_max + 1)
    c = domination_constant(w1, w2, n_max)
    if c is None or not c > 0:
        return EmbeddingResult(False, None, None)
    vals = _values(a)
    worst = None
    for n in ks:
        lhs = weighted_norm_partial(vals, w2, n)
        rhs = weighted_norm_partial(vals, w1, n) / c
        if lhs > rhs * (1 + 1e-12):
            worst = int(n)
            break
    return EmbeddingResult(True, worst is None, c, worst)


def reference_gaps(q: FourierPotential, n_max: int, tol: float = 1e-10) -> GapSequence:
    """Gaps of q itself: exact discriminant for a delta comb, Galerkin otherwise."""
    if q.name == "delta-comb" and len(q.params) == 1:
        alpha = q.params[0]
        res = band_edges_from_trace(lambda lam: delta_comb_trace(alpha, lam), n_max, root_tol=1e-12)
        return gaps(res)
    return gaps(galerkin.band_edges(q, n_max, tol=tol))


@dataclass
class SmoothingTable:
    K: list
    sup_diff: list
    N_used: list
    tol: float

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.sup_diff, self.sup_diff[1:]))

    @property
    def converged(self) -> bool:
        return bool(self.sup_diff) and self.sup_diff[-1] <= self.tol

    def records(self):
        return [{"K": int(k), "sup_diff": float(d), "N": int(n)}
                for k, d, n in zip(self.K, self.sup_diff, self.N_used)]


def smoothing_convergence(q: FourierPotential, K_list, n_max: int, tol: float,
                          reference: GapSequence | None = None,
                          gap_tol: float = 1e-10) -> SmoothingTable:
    """max_{n<=n_max} |gamma_{q_K}(n) - gamma_q(n)| for the truncations q_K."""
    K_list = [int(k) for k in K_list]
    if any(b <= a for a, b in zip(K_list, K_list[1:])):
        raise ValueError("K_list must be increasing")
    ref = reference if reference is not None else reference_gaps(q, n_max, gap_tol)
    diffs, Ns = [], []
    rises = 0
    for K in K_list:
        res = galerkin.band_edges(truncate(q, K), n_max, tol=gap_tol)
        d = float(np.max(np.abs(gaps(res).gamma - ref.gamma[:n_max])))
        if diffs and d > diffs[-1]:
            rises += 1
            if rises >= 2:
                raise ConvergenceError(f"gap differences grew over three successive K up to {K}")
        else:
            rises = 0
        diffs.append(d)
        Ns.append(res.N_used[galerkin.PERIODIC])
    return SmoothingTable(K_list, diffs, Ns, tol)
