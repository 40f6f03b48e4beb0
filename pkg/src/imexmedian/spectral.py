"""
Spectral analysis of the IMEX iteration matrix.

The linear part of the IMEX median solver is ``X -> B_k X`` with

    B_k = I - D_k L,    D_k = diag(k / (1 + k d_i)).

``B_k`` is row-stochastic and similar, through ``sqrt(D_k)``, to
``I - L_k`` with ``L_k = sqrt(D_k) L sqrt(D_k)`` symmetric positive
semi-definite. That similarity gives the decay bound

    ||B_k^n - 1 w_k^T||_2 <= C_k q_k^n

with ``C_k = sqrt((1 + k max d) / (1 + k min d))`` and
``q_k = max(|1 - lambda_2|, |1 - lambda_N|)`` over the eigenvalues of
``L_k``. All eigenvalues here come from `symmetric_eigs`, a cyclic Jacobi
solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BoundViolated, GraphError, NoConvergence, NotSymmetric
from .graph import Graph, laplacian

__all__ = [
    "symmetric_eigs",
    "closed_form_eigs",
    "spectral_norm",
    "iteration_matrix",
    "left_eigenvector",
    "SpectralReport",
    "contraction_constants",
    "DecayCheck",
    "verify_decay_bound",
    "steady_state_error_bound",
    "gain_for_tolerance",
]


# -- eigensolver --------------------------------------------------------------

def symmetric_eigs(m, tol=1e-12, max_sweeps=100, symmetry_tol=1e-10):
    """
    Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    m : array_like, shape (N, N)
        Matrix symmetric to within ``symmetry_tol`` (relative to its largest
        entry). It is symmetrized before iterating.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm is at most
        ``tol`` times the Frobenius norm of the matrix.
    max_sweeps : int
        Cap on full sweeps over all ``(p, q)`` pairs.

    Returns
    -------
    ndarray, shape (N,)
        Eigenvalues in nondecreasing order.

    Raises
    ------
    NotSymmetric
        If `m` is not square or not symmetric.
    NoConvergence
        If `max_sweeps` sweeps do not reach `tol`.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    scale = np.max(np.abs(a))
    if not np.isfinite(scale):
        raise NotSymmetric("matrix has non-finite entries")
    if scale == 0.0:
        return np.zeros(n)
    a /= scale
    if np.max(np.abs(a - a.T)) > symmetry_tol:
        raise NotSymmetric("matrix is not symmetric")
    a = 0.5 * (a + a.T)

    total = np.sum(a * a)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sum(a[offdiag] ** 2)
        if off <= (tol * tol) * total:
            return np.sort(np.diag(a)) * scale
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def closed_form_eigs(m):
    """
    Eigenvalues of a symmetric matrix with N <= 3 from the roots of its
    characteristic polynomial (trigonometric form for N = 3).
    """
    a = np.asarray(m, dtype=float)
    n = a.shape[0]
    if n == 1:
        return a[0].copy()
    if n == 2:
        mid = 0.5 * (a[0, 0] + a[1, 1])
        rad = math.hypot(0.5 * (a[0, 0] - a[1, 1]), a[0, 1])
        return np.array([mid - rad, mid + rad])
    if n != 3:
        raise ValueError("closed form only implemented for N <= 3")
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    if p1 == 0.0:
        return np.sort(np.diag(a))
    mean = np.trace(a) / 3.0
    p2 = np.sum((np.diag(a) - mean) ** 2) + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    r = np.linalg.det((a - mean * np.eye(3)) / p) / 2.0
    phi = math.acos(min(1.0, max(-1.0, r))) / 3.0
    e_hi = mean + 2.0 * p * math.cos(phi)
    e_lo = mean + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    return np.array([e_lo, 3.0 * mean - e_hi - e_lo, e_hi])


def spectral_norm(m) -> float:
    """Operator 2-norm, the square root of the largest eigenvalue of M^T M."""
    m = np.asarray(m, dtype=float)
    top = symmetric_eigs(m.T @ m)[-1]
    return math.sqrt(max(top, 0.0))


# -- iteration matrix and constants -------------------------------------------

def _check_gain(k):
    if not (k > 0 and math.isfinite(k)):
        raise ValueError(f"coupling gain must be positive and finite, got {k}")


def iteration_matrix(g: Graph, k: float) -> np.ndarray:
    """``B_k = I - diag(k / (1 + k d_i)) L``."""
    _check_gain(k)
    dk = k / (1.0 + k * g.degrees)
    return np.eye(g.n_agents) - dk[:, None] * laplacian(g)


def left_eigenvector(g: Graph, k: float) -> np.ndarray:
    """Left Perron vector of `B_k`: weights ``(1 + k d_i)`` normalized to sum to one."""
    _check_gain(k)
    c = 1.0 + k * g.degrees
    return c / c.sum()


@dataclass(frozen=True, eq=False)
class SpectralReport:
    """Matrices and constants governing the linear part of the IMEX network."""

    k: float
    b_k: np.ndarray
    w_k: np.ndarray
    d_k_diag: np.ndarray
    l_k_eigs: np.ndarray
    laplacian_eigs: np.ndarray
    c_k: float
    q_k: float
    c_inf: float
    q_inf: float
    error_bound: float
    explicit_ts_threshold: float

    def scalars(self) -> dict:
        return {
            "k": self.k,
            "C_k": self.c_k,
            "q_k": self.q_k,
            "C_inf": self.c_inf,
            "q_inf": self.q_inf,
            "error_bound": self.error_bound,
            "explicit_ts_threshold": self.explicit_ts_threshold,
        }

    def to_dict(self) -> dict:
        out = self.scalars()
        out.update(
            b_k=self.b_k.tolist(),
            w_k=self.w_k.tolist(),
            d_k_diag=self.d_k_diag.tolist(),
            l_k_eigs=self.l_k_eigs.tolist(),
            laplacian_eigs=self.laplacian_eigs.tolist(),
        )
        return out


def _ratio_of_extremes(lams):
    if lams.size < 2:
        return 0.0
    return max(abs(1.0 - lams[1]), abs(1.0 - lams[-1]))


def contraction_constants(g: Graph, k: float) -> SpectralReport:
    """
    Compute ``C_k``, ``q_k``, their large-gain limits and the derived bounds.

    ``q_inf`` uses the eigenvalues of ``D^{-1} L`` obtained from the
    symmetric similar matrix ``D^{-1/2} L D^{-1/2}``. It equals 1 on
    bipartite graphs, where ``D^{-1} L`` has eigenvalue 2.
    """
    _check_gain(k)
    lap = laplacian(g)
    d = g.degrees
    dk = k / (1.0 + k * d)
    sq = np.sqrt(dk)
    l_k_eigs = symmetric_eigs(sq[:, None] * lap * sq[None, :])
    q_k = _ratio_of_extremes(l_k_eigs)
    c_k = math.sqrt((1.0 + k * d.max()) / (1.0 + k * d.min()))

    inv_sq = 1.0 / np.sqrt(d)
    lam_inf = symmetric_eigs(inv_sq[:, None] * lap * inv_sq[None, :])
    q_inf = _ratio_of_extremes(lam_inf)
    c_inf = math.sqrt(d.max() / d.min())

    lap_eigs = symmetric_eigs(lap)
    n = g.n_agents
    bound = c_k / (1.0 - q_k) * math.sqrt(n) / (1.0 + k * d.min())
    return SpectralReport(
        k=float(k),
        b_k=iteration_matrix(g, k),
        w_k=left_eigenvector(g, k),
        d_k_diag=dk,
        l_k_eigs=l_k_eigs,
        laplacian_eigs=lap_eigs,
        c_k=c_k,
        q_k=q_k,
        c_inf=c_inf,
        q_inf=q_inf,
        error_bound=bound,
        explicit_ts_threshold=2.0 / (k * lap_eigs[-1]),
    )


def steady_state_error_bound(g: Graph, k: float) -> float:
    """
    Asymptotic disagreement bound ``C_k / (1 - q_k) * sqrt(N) / (1 + k min d)``.

    Bounds ``limsup ||(I - 1 w_k^T) X[n]||`` along any IMEX trajectory.
    """
    return contraction_constants(g, k).error_bound


@dataclass(frozen=True, eq=False)
class DecayCheck:
    k: float
    c_k: float
    q_k: float
    norms: np.ndarray
    ratios: np.ndarray

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))

    @property
    def passed(self) -> bool:
        return self.max_ratio <= 1.0 + 1e-9


def verify_decay_bound(g: Graph, k: float, n_max: int = 50, raise_on_violation=True) -> DecayCheck:
    """
    Check ``||B_k^n - 1 w_k^T||_2 <= C_k q_k^n`` for ``n = 0..n_max``.

    Powers are formed as ``(B_k - 1 w_k^T)^n``, which equals
    ``B_k^n - 1 w_k^T`` because ``1 w_k^T`` is a projector commuting with
    ``B_k``; this avoids cancellation once ``B_k^n`` is close to its limit.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    rep = contraction_constants(g, k)
    n = g.n_agents
    proj = np.outer(np.ones(n), rep.w_k)
    e = rep.b_k - proj
    power = np.eye(n) - proj
    norms = np.empty(n_max + 1)
    ratios = np.empty(n_max + 1)
    for step in range(n_max + 1):
        if step:
            power = power @ e
        norms[step] = spectral_norm(power)
        envelope = rep.c_k * rep.q_k**step
        if envelope > 0:
            ratios[step] = norms[step] / envelope
        else:
            ratios[step] = 0.0 if norms[step] == 0 else np.inf
    check = DecayCheck(k=float(k), c_k=rep.c_k, q_k=rep.q_k, norms=norms, ratios=ratios)
    if raise_on_violation and not check.passed:
        worst = int(np.argmax(ratios))
        raise BoundViolated(f"decay bound violated at n={worst}: ratio {ratios[worst]:.6g}")
    return check


def gain_for_tolerance(g: Graph, eps: float, safety: float = 3.0, k_max: float = 1e9) -> float:
    """
    Gain at which ``safety * steady_state_error_bound(g, k)`` first reaches `eps`.

    The bound is bracketed by doubling from ``k = 1e-3`` and the crossing is
    refined with Brent's method; the result is nudged up so the inequality
    holds at the returned value. ``safety = 3`` matches the accuracy
    guaranteed for each agent by the convergence argument.

    Raises
    ------
    GraphError
        If no gain up to `k_max` meets the tolerance (e.g. bipartite graphs,
        where the bound saturates as k grows).
    """
    if not eps > 0:
        raise ValueError("eps must be positive")

    def excess(k):
        return safety * steady_state_error_bound(g, k) - eps

    lo, hi = 0.0, 1e-3
    while excess(hi) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > k_max:
            raise GraphError(f"no gain up to {k_max:g} reaches tolerance {eps:g}")
    if lo == 0.0:
        return hi
    k = brentq(excess, lo, hi, xtol=1e-10 * hi, rtol=1e-12)
    while excess(k) > 0:
        k *= 1.0 + 1e-9
    return k
