"""Band edges of -d^2/dx^2 + q from truncated Fourier-Galerkin matrices.

Periodic eigenvalues (basis exp(2 pi i k x), k = -N..N) give lambda_0 and the
even-indexed gap edges; antiperiodic eigenvalues (basis exp(i pi (2k+1) x),
k = -N..N-1) give the odd-indexed ones.  In both sectors the matrix entry is
free kinetic energy on the diagonal plus qhat(j - k), which is also the
matrix of the form-sum operator when q is only in H^-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .potential import FourierPotential

PERIODIC = "periodic"
ANTIPERIODIC = "antiperiodic"

N_CAP = 4096
# backward error of LAPACK's Hermitian solver is a modest multiple of eps*||A||
EIG_BACKWARD_CONST = 8.0


class SpectrumError(RuntimeError):
    pass


class InterlacingError(SpectrumError):
    """Computed edges violate lambda_0 < l1- <= l1+ < l2- <= ..."""


class TruncationCapError(SpectrumError):
    pass


@dataclass
class SectorMatrix:
    sector: str
    N: int
    entries: np.ndarray

    @property
    def modes(self) -> np.ndarray:
        if self.sector == PERIODIC:
            return np.arange(-self.N, self.N + 1)
        return np.arange(-self.N, self.N)

    def norm_bound(self) -> float:
        return float(np.abs(self.entries).sum(axis=1).max())


@dataclass
class SpectrumResult:
    lambda0: float
    pairs: np.ndarray            # shape (n_max, 2): (lambda_n^-, lambda_n^+)
    err_est: np.ndarray          # shape (n_max + 1,) for [lambda0, gap 1, gap 2, ...]
    N_used: dict = field(default_factory=dict)
    method: str = "galerkin"

    @property
    def n_max(self) -> int:
        return len(self.pairs)

    def sector_of(self, n: int) -> str:
        return PERIODIC if n % 2 == 0 else ANTIPERIODIC

    def edges(self) -> np.ndarray:
        """All edges in InEq order: lambda0, l1-, l1+, l2-, ..."""
        return np.concatenate([[self.lambda0], self.pairs.ravel()])

    def records(self):
        out = []
        for n in range(1, self.n_max + 1):
            lo, hi = self.pairs[n - 1]
            out.append({"n": n, "lambda_minus": float(lo), "lambda_plus": float(hi),
                        "gamma": float(max(hi - lo, 0.0)), "err_est": float(self.err_est[n]),
                        "sector": self.sector_of(n)})
        return out


def build_matrix(q: FourierPotential, sector: str, N: int) -> SectorMatrix:
    if N < 1:
        raise ValueError("N must be at least 1")
    if sector == PERIODIC:
        k = np.arange(-N, N + 1)
        kinetic = (2.0 * np.pi * k) ** 2
    elif sector == ANTIPERIODIC:
        k = np.arange(-N, N)
        kinetic = ((2.0 * k + 1.0) * np.pi) ** 2
    else:
        raise ValueError(f"unknown sector {sector!r}")
    size = len(k)
    # A[j, k] = qhat(j - k): first column qhat(0..size-1), first row qhat(0..-(size-1))
    col = q.coeff(np.arange(size))
    row = q.coeff(-np.arange(size))
    A = scipy.linalg.toeplitz(col, row).astype(complex)
    A[np.diag_indices(size)] += kinetic
    return SectorMatrix(sector, N, A)


def hermitian_eigenvalues(m: SectorMatrix, count: int | None = None) -> np.ndarray:
    """Ascending eigenvalues (all, or the lowest ``count``)."""
    A = m.entries
    if not np.all(np.isfinite(A)):
        raise SpectrumError("matrix has non-finite entries")
    size = A.shape[0]
    if count is None or count >= size:
        vals = scipy.linalg.eigh(A, eigvals_only=True, driver="evd")
    else:
        vals = scipy.linalg.eigh(A, eigvals_only=True, subset_by_index=[0, count - 1], driver="evr")
    return np.sort(vals)


def eig_backward_bound(m: SectorMatrix) -> float:
    return EIG_BACKWARD_CONST * np.finfo(float).eps * m.norm_bound()


def _needed(n_max: int) -> tuple[int, int]:
    """Number of lowest periodic / antiperiodic eigenvalues used for n_max gaps."""
    n_even = n_max // 2
    n_odd = (n_max + 1) // 2
    return 2 * n_even + 1, 2 * n_odd


def _edges_at(q: FourierPotential, n_max: int, N: int):
    n_per, n_anti = _needed(n_max)
    mp = build_matrix(q, PERIODIC, N)
    ma = build_matrix(q, ANTIPERIODIC, N)
    if n_per > mp.entries.shape[0] or n_anti > ma.entries.shape[0]:
        raise ValueError(f"N = {N} too small for {n_max} gaps")
    mu = hermitian_eigenvalues(mp, n_per)
    nu = hermitian_eigenvalues(ma, n_anti) if n_anti else np.zeros(0)
    pairs = np.empty((n_max, 2))
    for n in range(1, n_max + 1):
        if n % 2 == 0:
            pairs[n - 1] = mu[n - 1], mu[n]
        else:
            pairs[n - 1] = nu[n - 1], nu[n]
    floor = max(eig_backward_bound(mp), eig_backward_bound(ma))
    return mu[0], pairs, floor


def band_edges_fixed(q: FourierPotential, n_max: int, N: int) -> SpectrumResult:
    """Edges from a single truncation N; err_est is only the eigensolver bound."""
    lam0, pairs, floor = _edges_at(q, n_max, N)
    res = SpectrumResult(float(lam0), pairs, np.full(n_max + 1, floor),
                         {PERIODIC: N, ANTIPERIODIC: N})
    check_interlacing(res)
    return res


def band_edges(q: FourierPotential, n_max: int, tol: float = 1e-8,
               N0: int | None = None, N_cap: int = N_CAP) -> SpectrumResult:
    """Edges for gaps 1..n_max, doubling N until every edge moves by < tol.

    A change smaller than twice the eigensolver bound also counts as
    converged, since no larger N could resolve it; the smaller truncation
    is then returned because its roundoff is lower.

    err_est per edge is max(|edge(2N) - edge(N)|, eigensolver bound).
    """
    if n_max < 1 or tol <= 0:
        raise ValueError("need n_max >= 1 and tol > 0")
    N = N0 if N0 is not None else max(16, 4 * n_max)
    if q.support is not None:
        # trigonometric polynomials need the basis to reach past their support
        N = max(N, q.support)
    if N > N_cap:
        raise TruncationCapError(f"initial truncation {N} exceeds cap {N_cap}")
    lam0, pairs, floor = _edges_at(q, n_max, N)
    prev = np.concatenate([[lam0], pairs.ravel()])
    while True:
        N2 = 2 * N
        if N2 > N_cap:
            raise TruncationCapError(
                f"edges not converged to {tol:g} before N reached the cap {N_cap}")
        lam0_2, pairs_2, floor_2 = _edges_at(q, n_max, N2)
        cur = np.concatenate([[lam0_2], pairs_2.ravel()])
        delta = np.abs(cur - prev)
        if np.all(delta < tol):
            lam0, pairs, floor, N = lam0_2, pairs_2, floor_2, N2
            break
        if np.all(delta < 2.0 * floor_2):
            # truncation error is already below roundoff at N, and the
            # smaller matrix carries less of it: keep the N result
            break
        lam0, pairs, floor, N, prev = lam0_2, pairs_2, floor_2, N2, cur
    edge_err = np.maximum(delta, floor)
    err = np.empty(n_max + 1)
    err[0] = edge_err[0]
    err[1:] = np.maximum(edge_err[1::2], edge_err[2::2])
    res = SpectrumResult(float(lam0), pairs, err, {PERIODIC: N, ANTIPERIODIC: N})
    check_interlacing(res)
    return res


def check_interlacing(res: SpectrumResult) -> None:
    """Raise InterlacingError unless lambda0 < l1- <= l1+ < l2- <= ... within err_est."""
    edges = res.edges()
    err = np.concatenate([[res.err_est[0]], np.repeat(res.err_est[1:], 2)])
    for i in range(len(edges) - 1):
        slack = err[i] + err[i + 1]
        strict = i % 2 == 0   # band interiors are nonempty
        if strict and not edges[i] < edges[i + 1] + slack:
            raise InterlacingError(f"edges {i} and {i + 1} out of order: {edges[i]!r} >= {edges[i + 1]!r}")
        if not strict and edges[i] > edges[i + 1] + slack:
            raise InterlacingError(f"gap edges {i}, {i + 1} inverted: {edges[i]!r} > {edges[i + 1]!r}")


@dataclass
class GapSequence:
    """gamma(n) = lambda_n^+ - lambda_n^-, n = 1..n_max, stored 0-based."""

    gamma: np.ndarray
    err_est: np.ndarray

    def __len__(self):
        return len(self.gamma)

    def __getitem__(self, n):
        return self.gamma[n - 1]

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, len(self.gamma) + 1)


def gaps(sr: SpectrumResult) -> GapSequence:
    """Gap lengths; rounding-level negative widths are clamped to 0."""
    raw = sr.pairs[:, 1] - sr.pairs[:, 0]
    err = np.asarray(sr.err_est[1:], dtype=float)
    if np.any(raw < -2 * err - 1e-300):
        bad = int(np.flatnonzero(raw < -2 * err)[0]) + 1
        raise InterlacingError(f"gap {bad} has negative width {raw[bad - 1]!r}")
    return GapSequence(np.maximum(raw, 0.0), err.copy())
