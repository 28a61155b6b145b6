"""Weight sequences and finite-sample checks for the weight classes.

The classes I0, M0, I-1 and M-1 are asymptotic conditions on an infinite
sequence, so nothing here proves membership.  Each check inspects the
weight on [1, k_max] and answers "consistent" or "violated"; a violation
always comes with the index (or pair) where it was seen.

Weights are evaluated in log space where possible so that rapidly growing
sequences such as exp(k) can be checked far past the float overflow point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

SUBMULT_TOL = 1e-12
MONO_TOL = 1e-12
TREND_BLOCKS = 4


class WeightError(ValueError):
    pass


@dataclass(frozen=True)
class Weight:
    """Even, nonnegative weight k -> w(k).

    ``fn`` and ``log_fn`` act on arrays of nonnegative indices; evenness is
    imposed by evaluating at |k|.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    descriptor: str
    log_fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, k):
        a = np.abs(np.asarray(k, dtype=float))
        return self.fn(a)

    def log(self, k):
        a = np.abs(np.asarray(k, dtype=float))
        if self.log_fn is not None:
            return self.log_fn(a)
        with np.errstate(divide="ignore"):
            return np.log(self.fn(a))

    def __str__(self):
        return self.descriptor


def power_weight(s: float) -> Weight:
    s = float(s)
    return Weight(lambda k: (1.0 + k) ** s, f"power:{s:g}", lambda k: s * np.log1p(k))


def powerlog_weight(s: float, r: float) -> Weight:
    """(1+k)^s * log(e+k)^r."""
    s, r = float(s), float(r)
    return Weight(lambda k: (1.0 + k) ** s * np.log(np.e + k) ** r, f"powerlog:{s:g}:{r:g}",
                  lambda k: s * np.log1p(k) + r * np.log(np.log(np.e + k)))


def inv_linear_log_weight() -> Weight:
    """log(e+k) / (1+k), the model M-1 weight."""
    return Weight(lambda k: np.log(np.e + k) / (1.0 + k), "inv-linear-log",
                  lambda k: np.log(np.log(np.e + k)) - np.log1p(k))


def exp_weight(rate: float = 1.0) -> Weight:
    rate = float(rate)
    return Weight(lambda k: np.exp(rate * k), f"exp:{rate:g}", lambda k: rate * k)


def custom_weight(fn, descriptor="custom", log_fn=None) -> Weight:
    return Weight(fn, descriptor, log_fn)


def parse_weight(text: str) -> Weight:
    """Parse "power:s", "powerlog:s:r", "inv-linear-log" or "exp:rate"."""
    parts = text.strip().split(":")
    name, args = parts[0], parts[1:]
    try:
        vals = [float(a) for a in args]
    except ValueError as exc:
        raise WeightError(f"bad weight parameters in {text!r}") from exc
    if name == "power" and len(vals) == 1:
        return power_weight(vals[0])
    if name == "powerlog" and len(vals) == 2:
        return powerlog_weight(*vals)
    if name == "inv-linear-log" and not vals:
        return inv_linear_log_weight()
    if name == "exp" and len(vals) <= 1:
        return exp_weight(*vals)
    raise WeightError(f"unknown weight descriptor {text!r}")


@dataclass
class ClassReport:
    class_name: str
    verdict: str
    k_range: tuple[int, int]
    witnesses: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"

    def as_dict(self):
        return {"class": self.class_name, "verdict": self.verdict,
                "k_min": self.k_range[0], "k_max": self.k_range[1],
                "reason": self.reason,
                **{k: _plain(v) for k, v in self.witnesses.items()}}


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


def _dyadic_blocks(k_max: int):
    """Complete blocks [2^j, 2^(j+1) - 1] inside [1, k_max]."""
    blocks = []
    j = 0
    while 2 ** (j + 1) - 1 <= k_max:
        blocks.append((2 ** j, 2 ** (j + 1) - 1))
        j += 1
    return blocks


def _runaway_trend(block_vals: np.ndarray) -> bool:
    """True if the last TREND_BLOCKS+1 block values keep increasing at a
    non-decaying rate (an unbounded trend rather than convergence)."""
    if len(block_vals) < TREND_BLOCKS + 1:
        return False
    tail = block_vals[-(TREND_BLOCKS + 1):]
    if np.any(~np.isfinite(tail)):
        return bool(np.any(tail == np.inf))
    d = np.diff(tail)
    if np.any(d <= 1e-9):
        return False
    # geometrically shrinking increments mean the values converge
    return bool(d[-1] >= 0.5 * d[0])


def _sandwich(w: Weight, lower_exp: float, upper_exp: float, k_max: int, label: str,
              extra=None) -> ClassReport:
    """|k|^lower_exp << w(k) << |k|^upper_exp on [1, k_max], in log space."""
    ks = np.arange(1, k_max + 1, dtype=float)
    logw = w.log(ks)
    logk = np.log(ks)
    lo = logw - lower_exp * logk
    hi = logw - upper_exp * logk
    wit = dict(extra or {})
    bad = np.flatnonzero(~np.isfinite(logw))
    rep = ClassReport(label, "consistent", (1, k_max), wit)
    finite_lo = np.where(np.isfinite(lo), lo, np.inf)
    finite_hi = np.where(np.isfinite(hi), hi, -np.inf)
    with np.errstate(over="ignore"):
        wit["C1"] = float(np.exp(finite_lo.min()))
        wit["C2"] = float(np.exp(finite_hi.max()))
    if bad.size:
        k_bad = int(ks[bad[0]])
        rep.verdict = "violated"
        wit["index"] = k_bad
        rep.reason = "weight is zero" if logw[bad[0]] == -np.inf else "weight is not finite"
        return rep
    blocks = _dyadic_blocks(k_max)
    lo_blocks = np.array([lo[a - 1:b].min() for a, b in blocks])
    hi_blocks = np.array([hi[a - 1:b].max() for a, b in blocks])
    if _runaway_trend(-lo_blocks):
        a, b = blocks[-1]
        rep.verdict = "violated"
        wit["index"] = int(a + np.argmin(lo[a - 1:b]))
        rep.reason = f"w(k)/k^{lower_exp:g} trends to 0 across dyadic blocks"
    elif _runaway_trend(hi_blocks):
        a, b = blocks[-1]
        rep.verdict = "violated"
        wit["index"] = int(a + np.argmax(hi[a - 1:b]))
        rep.reason = f"w(k)/k^{upper_exp:g} grows without bound across dyadic blocks"
    return rep


def check_I0(w: Weight, s: float, k_max: int) -> ClassReport:
    """|k|^s << w(k) << |k|^(1+s) with s >= 0."""
    if s < 0:
        raise WeightError("check_I0 needs s >= 0; use check_I_minus1 for s < 0")
    if k_max < 2:
        raise WeightError("k_max must be at least 2")
    return _sandwich(w, s, 1.0 + s, k_max, "I0", {"s": float(s)})


def check_I_minus1(w: Weight, s: float, k_max: int, delta: float | None = None) -> ClassReport:
    if s < -1:
        raise WeightError("I-1 is only defined for s >= -1")
    if k_max < 2:
        raise WeightError("k_max must be at least 2")
    if s == -1:
        ks = np.arange(1, k_max + 1, dtype=float)
        target = -np.log1p(ks)
        err = np.abs(w.log(ks) - target)
        rep = ClassReport("I-1", "consistent", (1, k_max), {"case": "i", "s": -1.0})
        rep.witnesses["max_log_deviation"] = float(np.nanmax(np.where(np.isfinite(err), err, np.inf)))
        off = np.flatnonzero(~(err <= 1e-12))
        if off.size:
            rep.verdict = "violated"
            rep.witnesses["index"] = int(ks[off[0]])
            rep.reason = "w(k) differs from (1+|k|)^-1"
        return rep
    if s < 0:
        if delta is None or delta <= 0:
            raise WeightError("case (ii) of I-1 needs delta > 0")
        rep = _sandwich(w, s, 1.0 + 2.0 * s - delta, k_max, "I-1",
                        {"case": "ii", "s": float(s), "delta": float(delta)})
        return rep
    rep = check_I0(w, s, k_max)
    rep.class_name = "I-1"
    rep.witnesses["case"] = "iii"
    return rep


def _pairs(k_max: int):
    """(k, m) with k, m >= 1 and k + m <= k_max."""
    if k_max <= 512:
        k, m = np.meshgrid(np.arange(1, k_max), np.arange(1, k_max), indexing="ij")
        keep = k + m <= k_max
        return k[keep], m[keep]
    grid = np.unique(np.round(np.geomspace(1, k_max - 1, 400)).astype(np.int64))
    k, m = np.meshgrid(grid, grid, indexing="ij")
    k, m = k.ravel(), m.ravel()
    ks = np.arange(1, k_max, dtype=np.int64)
    half = np.arange(1, k_max // 2 + 1, dtype=np.int64)
    k = np.concatenate([k, ks, half, ks])
    m = np.concatenate([m, np.ones_like(ks), half, k_max - ks])
    keep = k + m <= k_max
    return k[keep], m[keep]


def _m0_on_logs(logw_fn, k_max: int, label: str) -> ClassReport:
    if k_max < 4:
        raise WeightError("k_max must be at least 4")
    ks = np.arange(1, k_max + 1, dtype=float)
    logw = logw_fn(ks)
    rep = ClassReport(label, "consistent", (1, k_max), {})
    wit = rep.witnesses

    # (i) monotone increase towards infinity
    drop = np.flatnonzero(np.diff(logw) < -MONO_TOL * np.maximum(1.0, np.abs(logw[:-1])))
    if drop.size:
        rep.verdict = "violated"
        wit.update(condition="monotonicity", index=int(ks[drop[0]]))
        rep.reason = f"w({int(ks[drop[0]]) + 1}) < w({int(ks[drop[0]])})"
        return rep
    if not logw[-1] > logw[0]:
        rep.verdict = "violated"
        wit.update(condition="monotonicity", index=int(k_max))
        rep.reason = "w does not increase on the sampled range"
        return rep

    # (ii) submultiplicativity
    k, m = _pairs(k_max)
    lhs = logw[k + m - 1]
    rhs = logw[k - 1] + logw[m - 1] + np.log1p(SUBMULT_TOL)
    bad = np.flatnonzero(lhs > rhs)
    wit["pairs_checked"] = int(k.size)
    if bad.size:
        i = bad[0]
        rep.verdict = "violated"
        wit.update(condition="submultiplicativity", pair=(int(k[i]), int(m[i])))
        rep.reason = f"w({int(k[i] + m[i])}) > w({int(k[i])}) w({int(m[i])})"
        return rep

    # (iii) log w(k) / k decreasing to zero
    rate = logw / ks
    up = np.flatnonzero(np.diff(rate) > MONO_TOL * np.maximum(1.0, np.abs(rate[:-1])))
    if up.size:
        rep.verdict = "violated"
        wit.update(condition="subexponentiality", index=int(ks[up[0]]))
        rep.reason = "log w(k)/k increases"
        return rep
    wit["rate_first"] = float(rate[0])
    wit["rate_last"] = float(rate[-1])
    if not rate[-1] < rate[0] - MONO_TOL * max(1.0, abs(rate[0])):
        rep.verdict = "violated"
        wit.update(condition="subexponentiality", index=int(k_max))
        rep.reason = "log w(k)/k does not decrease towards 0"
    return rep


def check_M0(w: Weight, k_max: int) -> ClassReport:
    """Monotone, submultiplicative, subexponential on [1, k_max]; w(0) ignored."""
    return _m0_on_logs(w.log, k_max, "M0")


def check_M_minus1(w: Weight, k_max: int) -> ClassReport:
    """w = w*/(1+|k|) with w* in M0."""
    rep = _m0_on_logs(lambda k: np.log1p(k) + w.log(k), k_max, "M-1")
    return rep


def domination_constant(w1: Weight, w2: Weight, k_max: int) -> float | None:
    """c = min w1/w2 on [0, k_max], or None if w1/w2 trends to 0 (no uniform c)."""
    ks = np.arange(0, k_max + 1, dtype=float)
    lr = w1.log(ks) - w2.log(ks)
    if not np.all(np.isfinite(lr)):
        return None
    blocks = _dyadic_blocks(k_max)
    mins = np.array([lr[a:b + 1].min() for a, b in blocks])
    if _runaway_trend(-mins):
        return None
    return float(np.exp(lr.min()))
