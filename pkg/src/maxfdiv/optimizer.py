"""Riemannian search on the unitary group, confirming the closed-form
orbit extremes independently.

The objective U -> S_f(rho || U* sigma U) is differentiated exactly: moving
the variation onto rho gives

    d/dt S_f(rho || (U e^{tK})* sigma (U e^{tK})) |_{t=0} = Re Tr(C K),

with C = [rho, Htilde], Htilde = S^{-1/2} G S^{-1/2}, where S = U* sigma U
and G is the Frechet derivative of the matrix function f at
X = S^{-1/2} rho S^{-1/2} applied to S (a divided-difference Schur
multiplier in X's eigenbasis).  C is skew-Hermitian; steepest descent steps
along U exp(-eta C)... i.e. K = +/- C with geodesic Armijo backtracking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .divergence import s_hat_direct_raw
from .errors import DomainViolation, SingularSigma
from .extremal import extremal_max, extremal_min, extremal_unitaries
from .functions import OperatorConvexFunction
from .linalg import DensityState, TOL_RANK, haar_unitary, hermitize

GRAD_TOL = 1e-7
OPT_TOL = 1e-6
MAX_ITERS = 500
ARMIJO = 1e-4
ETA0 = 0.5
SHRINK = 0.5


@dataclass
class OptimizerTrace:
    """Iterate history of one search (or the best of several restarts)."""

    iterates: list[tuple[int, float, float]]  # (step, objective, gradient norm)
    final_unitary: np.ndarray
    converged: bool
    restarts_used: int = 1
    direction: str = "min"

    @property
    def best_value(self) -> float:
        return self.iterates[-1][1]

    @property
    def final_gradient_norm(self) -> float:
        return self.iterates[-1][2]

    def to_dict(self) -> dict:
        return {
            "iterates": [[k, v, g] for k, v, g in self.iterates],
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "direction": self.direction,
            "best_value": self.best_value,
        }


def orbit_objective(rho: DensityState, sigma: DensityState,
                    f: OperatorConvexFunction, u: np.ndarray) -> float:
    """S_f(rho || U* sigma U); invariant under global phases of U."""
    return s_hat_direct_raw(rho.matrix, hermitize(u.conj().T @ sigma.matrix @ u), f)


def _divided_differences(xw: np.ndarray, f: OperatorConvexFunction) -> np.ndarray:
    fw = f.fn(xw)
    diff = xw[:, None] - xw[None, :]
    close = np.abs(diff) <= 1e-8 * max(1.0, float(np.abs(xw).max()))
    safe = np.where(close, 1.0, diff)
    dd = (fw[:, None] - fw[None, :]) / safe
    mid = f.deriv((xw[:, None] + xw[None, :]) / 2.0)
    return np.where(close, mid, dd)


def value_and_gradient(rho_mat: np.ndarray, sigma_u: np.ndarray,
                       f: OperatorConvexFunction) -> tuple[float, np.ndarray]:
    """Objective value and the skew-Hermitian gradient commutator C.

    Re Tr(C K) is the derivative of the objective along U e^{tK} at t = 0.
    Requires a full-rank relative spectrum (the derivative of f must be
    finite on it).
    """
    w, v = np.linalg.eigh(sigma_u)
    if w.min() <= TOL_RANK * max(w.max(), 1.0):
        raise SingularSigma("orbit point is rank-deficient")
    inv_sqrt = (v * w ** -0.5) @ v.conj().T
    x_mat = hermitize(inv_sqrt @ rho_mat @ inv_sqrt)
    xw, xv = np.linalg.eigh(x_mat)
    xw = np.maximum(xw, 0.0)
    if xw.min() <= TOL_RANK * max(1.0, xw.max()):
        raise DomainViolation("gradient needs a strictly positive relative spectrum")
    s_in_x = xv.conj().T @ sigma_u @ xv
    value = float(np.real(np.diag(s_in_x)) @ f.fn(xw))
    g = xv @ (_divided_differences(xw, f) * s_in_x) @ xv.conj().T
    h_tilde = inv_sqrt @ g @ inv_sqrt
    c = rho_mat @ h_tilde - h_tilde @ rho_mat
    return value, c


def directional_derivative(rho: DensityState, sigma: DensityState,
                           f: OperatorConvexFunction, u: np.ndarray,
                           k: np.ndarray) -> float:
    """Analytic d/dt of the orbit objective along U e^{tK} at t = 0."""
    sigma_u = hermitize(u.conj().T @ sigma.matrix @ u)
    _, c = value_and_gradient(rho.matrix, sigma_u, f)
    return float(np.trace(c @ k).real)


def skew_hermitian_basis(n: int) -> list[np.ndarray]:
    """Orthonormal basis (real Hilbert-Schmidt inner product) of u(n)."""
    basis = []
    for i in range(n):
        b = np.zeros((n, n), dtype=complex)
        b[i, i] = 1j
        basis.append(b)
    for i in range(n):
        for j in range(i + 1, n):
            b = np.zeros((n, n), dtype=complex)
            b[i, j] = 1.0 / np.sqrt(2.0)
            b[j, i] = -1.0 / np.sqrt(2.0)
            basis.append(b)
            b = np.zeros((n, n), dtype=complex)
            b[i, j] = 1j / np.sqrt(2.0)
            b[j, i] = 1j / np.sqrt(2.0)
            basis.append(b)
    return basis


def _geodesic_step(u: np.ndarray, k: np.ndarray, eta: float,
                   eig_cache: tuple[np.ndarray, np.ndarray] | None = None
                   ) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray]]:
    """U exp(eta K) for skew-Hermitian K, reusing the eigensystem of iK."""
    if eig_cache is None:
        hw, hv = np.linalg.eigh(1j * k)
        eig_cache = (hw, hv)
    hw, hv = eig_cache
    step = (hv * np.exp(-1j * eta * hw)) @ hv.conj().T
    return u @ step, eig_cache


def finite_difference_gradient(rho: DensityState, sigma: DensityState,
                               f: OperatorConvexFunction, u: np.ndarray,
                               h: float = 1e-6) -> np.ndarray:
    """Gradient commutator estimated by central differences over a skew basis.

    Returns C_fd with Re Tr(C_fd K) approximating the directional derivative;
    O(n^2) objective evaluations, intended for cross-validation at small n.
    """
    n = rho.dim
    c_fd = np.zeros((n, n), dtype=complex)
    for b in skew_hermitian_basis(n):
        up, cache = _geodesic_step(u, b, h)
        um, _ = _geodesic_step(u, b, -h, cache)
        d = (orbit_objective(rho, sigma, f, up) - orbit_objective(rho, sigma, f, um)) / (2 * h)
        # Re Tr(C B) = -<C, B> for skew C, B
        c_fd -= d * b
    return c_fd


def _optimize_single(rho_mat: np.ndarray, sigma_mat: np.ndarray,
                     f: OperatorConvexFunction, u0: np.ndarray, direction: str,
                     grad_tol: float, max_iters: int, armijo: float,
                     eta0: float, shrink: float) -> OptimizerTrace:
    sign = 1.0 if direction == "min" else -1.0
    u = u0
    iterates: list[tuple[int, float, float]] = []
    converged = False
    for k_iter in range(max_iters + 1):
        sigma_u = hermitize(u.conj().T @ sigma_mat @ u)
        value, c = value_and_gradient(rho_mat, sigma_u, f)
        g2 = float(np.linalg.norm(c, "fro") ** 2)
        gnorm = math.sqrt(g2)
        iterates.append((k_iter, value, gnorm))
        if gnorm <= grad_tol:
            converged = True
            break
        if k_iter == max_iters:
            break
        k_dir = c if direction == "min" else -c
        eta = eta0
        cache = None
        accepted = False
        while eta > 1e-14:
            u_trial, cache = _geodesic_step(u, k_dir, eta, cache)
            v_trial = s_hat_direct_raw(
                rho_mat, hermitize(u_trial.conj().T @ sigma_mat @ u_trial), f)
            if sign * (v_trial - value) <= -armijo * eta * g2:
                u = u_trial
                accepted = True
                break
            eta *= shrink
        if not accepted:
            break  # line search stalled below machine step size
    return OptimizerTrace(iterates=iterates, final_unitary=u,
                          converged=converged, direction=direction)


def riemannian_optimize(
    rho: DensityState,
    sigma: DensityState,
    f: OperatorConvexFunction,
    direction: str = "min",
    restarts: int = 20,
    rng: np.random.Generator | None = None,
    grad_tol: float = GRAD_TOL,
    max_iters: int = MAX_ITERS,
    armijo: float = ARMIJO,
    eta0: float = ETA0,
    shrink: float = SHRINK,
    seed_extremizers: bool = True,
) -> OptimizerTrace:
    """Best-of-restarts geodesic line search.

    Two restarts are seeded at the closed-form extremizers (so the result
    can never be worse than the spectral value); the rest start Haar-random.
    Returns the best run's trace; converged reflects that run.
    """
    if direction not in ("min", "max"):
        raise DomainViolation(f"direction must be 'min' or 'max', got {direction!r}")
    if restarts < 1:
        raise DomainViolation("restarts must be >= 1")
    if not sigma.full_rank:
        raise SingularSigma("optimizer needs full-rank sigma")
    n = rho.dim
    starts: list[np.ndarray] = []
    if seed_extremizers:
        u_min, u_max = extremal_unitaries(rho, sigma)
        preferred = [u_min, u_max] if direction == "min" else [u_max, u_min]
        starts.extend(preferred[:restarts])
    if len(starts) < restarts and rng is None:
        raise DomainViolation("rng is required for Haar restarts")
    while len(starts) < restarts:
        starts.append(haar_unitary(n, rng))

    best: OptimizerTrace | None = None
    better = (lambda a, b: a < b) if direction == "min" else (lambda a, b: a > b)
    for u0 in starts:
        trace = _optimize_single(rho.matrix, sigma.matrix, f, u0, direction,
                                 grad_tol, max_iters, armijo, eta0, shrink)
        if best is None or better(trace.best_value, best.best_value):
            best = trace
    assert best is not None
    best.restarts_used = len(starts)
    return best


@dataclass(frozen=True)
class StationarityReport:
    """Commutator residuals of the first-order optimality condition.

    commutator_residual_a_rho = ||[A, rho]||_F with A = U* sigma^{-1} U;
    commutator_residual_a_h lists per-node Frobenius norms ||[A, H_s]||_F for
    H_s = rho^2 Y - A^{1/2} rho Y rho A^{1/2} Y, Y = (A^{1/2} rho A^{1/2} + sI)^{-1}.
    Both vanish at the closed-form extremizers, where A and rho commute.
    """

    commutator_residual_a_rho: float
    commutator_residual_a_h: tuple[tuple[float, float], ...]


def stationarity_residual(rho: DensityState, sigma: DensityState,
                          u: np.ndarray,
                          s_nodes: tuple[float, ...] = (0.1, 1.0, 10.0)
                          ) -> StationarityReport:
    """Evaluate the stationarity residuals at an orbit point U."""
    if not sigma.full_rank:
        raise SingularSigma("stationarity residual needs full-rank sigma")
    n = rho.dim
    w, v = np.linalg.eigh(sigma.matrix)
    sigma_inv = (v * 1.0 / w) @ v.conj().T
    a = hermitize(u.conj().T @ sigma_inv @ u)
    rho_mat = rho.matrix
    res_rho = float(np.linalg.norm(a @ rho_mat - rho_mat @ a, "fro"))
    aw, av = np.linalg.eigh(a)
    a_half = (av * np.sqrt(aw)) @ av.conj().T
    x = hermitize(a_half @ rho_mat @ a_half)
    rows = []
    for s in s_nodes:
        y = np.linalg.inv(x + s * np.eye(n))
        h = rho_mat @ rho_mat @ y - a_half @ rho_mat @ y @ rho_mat @ a_half @ y
        rows.append((float(s), float(np.linalg.norm(a @ h - h @ a, "fro"))))
    return StationarityReport(commutator_residual_a_rho=res_rho,
                              commutator_residual_a_h=tuple(rows))
