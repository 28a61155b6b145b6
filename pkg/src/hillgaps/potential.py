"""1-periodic real potentials represented by their Fourier coefficients.

A potential q(x) = sum_k qhat(k) exp(2 pi i k x) is stored as a coefficient
oracle: a vectorized function of the nonnegative index k.  Negative indices
come from Hermitian reflection, qhat(-k) = conj(qhat(k)), so every potential
built here is real-valued by construction.  Coefficients are materialized
lazily and memoized, because the delta comb and the power-decay family have
infinite support and consumers only learn how far they need to look at run
time.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

FINITE = "finitely-supported"
POWER = "power-decay"
CONSTANT = "constant"

# rank used to combine tail classes of sums: the slowest tail wins
_TAIL_RANK = {FINITE: 0, POWER: 1, CONSTANT: 2}


class PotentialError(ValueError):
    """Inconsistent or inadmissible potential data."""


@dataclass(frozen=True)
class TailClass:
    kind: str
    exponent: float | None = None

    def __str__(self):
        if self.kind == POWER:
            return f"{POWER}({self.exponent:g})"
        return self.kind


class FourierPotential:
    """Hermitian-symmetric coefficient oracle with memoized materialization.

    ``generate(ks)`` receives a contiguous int64 array ``ks`` of nonnegative
    indices (in increasing order, starting where the cache ends) and returns
    the complex coefficients.  ``support`` is the largest nonzero index for
    finitely supported potentials and ``None`` otherwise.
    """

    _CHUNK = 256

    def __init__(self, generate: Callable[[np.ndarray], np.ndarray],
                 tail: TailClass, support: int | None = None,
                 name: str = "custom", params: tuple = ()):
        self._generate = generate
        self.tail = tail
        self.support = support
        self.name = name
        self.params = tuple(params)
        self._cache = np.zeros(0, dtype=complex)
        self._lock = threading.Lock()

    def __repr__(self):
        args = ", ".join(f"{p:g}" if isinstance(p, float) else repr(p) for p in self.params)
        return f"FourierPotential({self.name}({args}), tail={self.tail})"

    @property
    def tail_class(self) -> str:
        return self.tail.kind

    @property
    def k_realized(self) -> int:
        return len(self._cache) - 1

    def realize(self, K: int) -> None:
        """Materialize coefficients for 0 <= k <= K (idempotent)."""
        K = int(K)
        if K <= self.k_realized:
            return
        with self._lock:
            have = len(self._cache)
            if K < have:
                return
            # grow geometrically so repeated small requests stay cheap
            stop = max(K + 1, 2 * have, self._CHUNK)
            if self.support is not None:
                stop = max(K + 1, min(stop, self.support + 1))
            ks = np.arange(have, stop, dtype=np.int64)
            new = np.asarray(self._generate(ks), dtype=complex)
            if new.shape != ks.shape:
                raise PotentialError("coefficient generator returned wrong shape")
            if have == 0 and new[0].imag != 0.0:
                raise PotentialError("qhat(0) must be real")
            # publish a fresh array; readers holding the old one stay valid
            self._cache = np.concatenate([self._cache, new])

    def coeff(self, k):
        """qhat(k) for an integer or integer array (any sign)."""
        k_arr = np.asarray(k, dtype=np.int64)
        a = np.abs(k_arr)
        top = int(a.max()) if a.size else 0
        self.realize(top)
        vals = self._cache[a]
        vals = np.where(k_arr < 0, np.conj(vals), vals)
        return vals if np.ndim(k) else complex(vals)

    def __getitem__(self, k):
        return self.coeff(k)

    def coeffs(self, K: int) -> np.ndarray:
        """Array of qhat(k) for k = -K..K."""
        return self.coeff(np.arange(-K, K + 1))

    def evaluate(self, x):
        """Pointwise value q(x); only defined for finitely supported potentials."""
        if self.support is None:
            raise PotentialError(f"{self.name} has infinite support; pointwise values are undefined")
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, self.coeff(0).real)
        for k in range(1, self.support + 1):
            c = self.coeff(k)
            if c != 0:
                out = out + 2.0 * np.real(c * np.exp(2j * np.pi * k * x))
        return out

    def map(self, fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
            name: str, params: tuple = (), tail: TailClass | None = None,
            support: int | None | str = "same") -> "FourierPotential":
        """New potential with coefficients fn(ks, qhat(ks)) on k >= 0."""
        base = self

        def gen(ks):
            return fn(ks, base.coeff(ks))

        return FourierPotential(gen, tail or self.tail,
                                self.support if support == "same" else support,
                                name=name, params=params)


def _finite_generator(table: dict[int, complex]):
    def gen(ks):
        return np.array([table.get(int(k), 0j) for k in ks], dtype=complex)
    return gen


def make_potential(coeffs: Iterable[tuple[int, complex]]) -> FourierPotential:
    """Finitely supported potential from (k, qhat(k)) pairs.

    Missing mirror indices are filled in by Hermitian reflection.
    """
    given: dict[int, complex] = {}
    for k, v in coeffs:
        k = int(k)
        if k in given:
            raise PotentialError(f"index {k} supplied twice")
        given[k] = complex(v)
    table: dict[int, complex] = {}
    for k, v in given.items():
        if k == 0:
            if v.imag != 0.0:
                raise PotentialError("qhat(0) must be real for a real-valued potential")
            table[0] = v
            continue
        mirror = given.get(-k)
        if mirror is not None and mirror != v.conjugate():
            raise PotentialError(f"qhat({k}) and qhat({-k}) are not complex conjugates")
        table[abs(k)] = v if k > 0 else v.conjugate()
    table = {k: v for k, v in table.items() if v != 0}
    support = max(table, default=0)
    pairs = tuple(sorted(table.items()))
    return FourierPotential(_finite_generator(table), TailClass(FINITE), support,
                            name="coefficients", params=pairs)


def zero() -> FourierPotential:
    return make_potential([])


def mathieu(c: float) -> FourierPotential:
    """q(x) = 2c cos(2 pi x), i.e. qhat(+-1) = c."""
    q = make_potential([(1, float(c))])
    q.name, q.params = "mathieu", (float(c),)
    return q


def delta_comb(alpha: float) -> FourierPotential:
    """alpha * sum_j delta(x - j); every Fourier coefficient equals alpha."""
    alpha = float(alpha)

    def gen(ks):
        return np.full(ks.shape, alpha, dtype=complex)

    if alpha == 0.0:
        return FourierPotential(gen, TailClass(FINITE), 0, name="delta-comb", params=(alpha,))
    return FourierPotential(gen, TailClass(CONSTANT), None, name="delta-comb", params=(alpha,))


def power_decay(p: float, seed: int = 0) -> FourierPotential:
    """qhat(k) = k^-p exp(i phi_k) for k >= 1, qhat(0) = 0.

    The phases are phi_k = 2 pi u_k with u_1, u_2, ... the consecutive
    doubles drawn from ``numpy.random.Generator(PCG64(seed)).random``.
    PCG64 is fully specified, so the stream is platform independent.
    """
    p = float(p)
    if not p > -0.5:
        raise PotentialError(f"power_decay needs p > -1/2 to stay in H^-1, got {p}")
    rng = np.random.Generator(np.random.PCG64(seed))
    lock = threading.Lock()
    drawn: list[np.ndarray] = []

    def gen(ks):
        # ks is always the contiguous continuation of what was drawn before
        with lock:
            n_new = int(ks[-1]) if ks[0] == 0 else len(ks)
            drawn.append(rng.random(n_new))
            u = drawn[-1]
        out = np.zeros(ks.shape, dtype=complex)
        pos = ks > 0
        kk = ks[pos].astype(float)
        out[pos] = kk ** (-p) * np.exp(2j * np.pi * u[-len(kk):])
        return out

    return FourierPotential(gen, TailClass(POWER, p), None, name="power-decay", params=(p, int(seed)))


def truncate(q: FourierPotential, K: int) -> FourierPotential:
    """Trigonometric polynomial keeping qhat(k) for |k| <= K."""
    K = int(K)
    if K < 0:
        raise PotentialError("truncation order must be nonnegative")
    q.realize(K)
    table = {k: complex(q.coeff(k)) for k in range(K + 1)}
    table = {k: v for k, v in table.items() if v != 0}
    out = FourierPotential(_finite_generator(table), TailClass(FINITE), max(table, default=0),
                           name=f"truncate[{K}]", params=(q.name,) + q.params)
    return out


def shift(q: FourierPotential, c: float) -> FourierPotential:
    """q + c (adds c to qhat(0))."""
    c = float(c)
    return q.map(lambda ks, v: v + np.where(ks == 0, c, 0.0), name=f"{q.name}+const",
                 params=q.params + (c,))


def scale(q: FourierPotential, c: float) -> FourierPotential:
    c = float(c)
    tail = TailClass(FINITE) if c == 0 else q.tail
    return q.map(lambda ks, v: c * v, name=f"{q.name}*{c:g}", params=q.params,
                 tail=tail, support=0 if c == 0 else "same")


def translate(q: FourierPotential, a: float) -> FourierPotential:
    """q(x + a): qhat(k) -> exp(2 pi i k a) qhat(k)."""
    a = float(a)
    return q.map(lambda ks, v: np.exp(2j * np.pi * ks * a) * v, name=f"{q.name}@{a:g}",
                 params=q.params)


def reflect(q: FourierPotential) -> FourierPotential:
    """q(-x): qhat(k) -> qhat(-k)."""
    return q.map(lambda ks, v: np.conj(v), name=f"{q.name}~", params=q.params)


def add(q1: FourierPotential, q2: FourierPotential) -> FourierPotential:
    tail = max((q1.tail, q2.tail), key=lambda t: (_TAIL_RANK[t.kind], -(t.exponent or 0.0)))
    support = None
    if q1.support is not None and q2.support is not None:
        support = max(q1.support, q2.support)

    def gen(ks):
        return q1.coeff(ks) + q2.coeff(ks)

    return FourierPotential(gen, tail, support, name=f"{q1.name}+{q2.name}",
                            params=q1.params + q2.params)


def hormander_norm_partial(q: FourierPotential, w, K: int) -> float:
    """sqrt(sum_{|k|<=K} w(k)^2 |qhat(k)|^2)."""
    ks = np.arange(-int(K), int(K) + 1)
    return float(np.sqrt(np.sum(w(ks) ** 2 * np.abs(q.coeff(ks)) ** 2)))


def h_minus1_partial_sum(q: FourierPotential, K: int) -> float:
    """sum_{|k|<=K} |qhat(k)|^2 / (1+|k|)^2; bounded in K for H^-1 potentials."""
    ks = np.arange(-int(K), int(K) + 1)
    return float(np.sum(np.abs(q.coeff(ks)) ** 2 / (1.0 + np.abs(ks)) ** 2))
