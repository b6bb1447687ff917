"""Maximal quantum f-divergence evaluation.

For full-rank sigma the divergence of two states is

    S_f(rho || sigma) = Tr[ sigma f(sigma^{-1/2} rho sigma^{-1/2}) ],

computed here through the spectrum x_k of X = sigma^{-1/2} rho sigma^{-1/2}
and the weights m_k = <q_k| sigma |q_k> of its eigenvectors, so that the
value is the weighted scalar sum  sum_k m_k f(x_k).  Three routes are
provided: direct functional calculus, the integral-representation form with
a per-term breakdown, and an epsilon-regularized limit for singular inputs.

The per-node integrand of the representation route is evaluated as
Tr[ sigma (X - I)^2 (X + sI)^{-1} ] = sum_k m_k (x_k - 1)^2 / (x_k + s),
which reduces to the familiar quotient / rho / sigma term split whenever the
states commute (in particular in every spectral extremal formula).

The module also hosts the hockey-stick divergence E_s and the comparison
divergence built from it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import (
    DomainViolation,
    MeasureUnavailable,
    QuadratureNotConverged,
    SingularSigma,
)
from .functions import OperatorConvexFunction
from .linalg import DensityState, TOL_RANK, hermitize

DEFAULT_EPSILONS = tuple(10.0 ** -k for k in range(2, 9))  # 1e-2 .. 1e-8
CONV_TOL = 1e-6  # relative, for the epsilon sweep


@dataclass
class DivergenceResult:
    """Value of a divergence evaluation plus provenance.

    value may be math.inf (a diverging epsilon sweep is a valid outcome).
    term_breakdown, when present, sums to value.
    """

    value: float
    method: str
    epsilon_trace: list[tuple[float, float]] | None = None
    term_breakdown: dict | None = None

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def to_dict(self) -> dict:
        d: dict = {
            "value": self.value if math.isfinite(self.value) else "inf",
            "method": self.method,
        }
        if self.epsilon_trace is not None:
            d["epsilon_trace"] = [[e, v if math.isfinite(v) else "inf"]
                                  for e, v in self.epsilon_trace]
        if self.term_breakdown is not None:
            d["breakdown"] = self.term_breakdown
        return d


def relative_spectrum(rho_mat: np.ndarray, sigma_mat: np.ndarray,
                      rank_tol: float = TOL_RANK) -> tuple[np.ndarray, np.ndarray]:
    """Spectrum x of X = sigma^{-1/2} rho sigma^{-1/2} and weights m.

    m_k is the diagonal of sigma in X's eigenbasis, so that
    Tr[sigma g(X)] = sum_k m_k g(x_k) for any scalar g.  Raises SingularSigma
    when sigma is rank-deficient relative to rank_tol.
    """
    w, v = np.linalg.eigh(sigma_mat)
    top = float(w.max())
    if top <= 0 or w.min() <= rank_tol * top:
        raise SingularSigma(
            f"sigma eigenvalue range [{w.min():.3e}, {top:.3e}] is rank-deficient"
        )
    inv_sqrt = (v * w ** -0.5) @ v.conj().T
    x_mat = hermitize(inv_sqrt @ rho_mat @ inv_sqrt)
    xw, xv = np.linalg.eigh(x_mat)
    # X is a congruence of a PSD matrix; tiny negative eigenvalues are rounding
    xw = np.maximum(xw, 0.0)
    m = np.einsum("ji,jk,ki->i", xv.conj(), sigma_mat, xv).real
    return xw, m


def _zero_tol(x: np.ndarray) -> float:
    return TOL_RANK * max(1.0, float(x.max()) if x.size else 1.0)


def s_hat_direct_raw(rho_mat: np.ndarray, sigma_mat: np.ndarray,
                     f: OperatorConvexFunction) -> float:
    """Direct evaluation on raw matrices (sigma must be full rank)."""
    x, m = relative_spectrum(rho_mat, sigma_mat)
    fx = f.eval_spectrum(x, zero_tol=_zero_tol(x))
    return float(m @ fx)


def s_hat_direct(rho: DensityState, sigma: DensityState,
                 f: OperatorConvexFunction) -> DivergenceResult:
    """Tr[sigma f(sigma^{-1/2} rho sigma^{-1/2})] by functional calculus.

    Raises SingularSigma for rank-deficient sigma and DomainViolation when
    the relative spectrum touches 0 while f is unbounded at 0+ (use
    s_hat_regularized in both cases).
    """
    if not sigma.full_rank:
        raise SingularSigma("sigma is singular; use s_hat_regularized")
    value = s_hat_direct_raw(rho.matrix, sigma.matrix, f)
    return DivergenceResult(value=value, method="direct")


def s_hat_integral(rho: DensityState, sigma: DensityState,
                   f: OperatorConvexFunction) -> DivergenceResult:
    """Integral-representation route with a per-term breakdown.

    value = f(1) Tr(sigma) + f'(1) [Tr(rho) - Tr(sigma)]
          + c [Tr(sigma^{-1} rho^2) - 1]
          + sum over measure nodes of w * Tr[sigma (X-I)^2 (X+sI)^{-1}].
    """
    if not sigma.full_rank:
        raise SingularSigma("sigma is singular; use s_hat_regularized")
    measure = f.measure
    if measure.kind == "none":
        raise MeasureUnavailable(f"{f.label} carries no representation measure")
    x, m = relative_spectrum(rho.matrix, sigma.matrix)
    ztol = _zero_tol(x)
    if np.any(x <= ztol) and f.limit_at_zero is None:
        raise DomainViolation(f"{f.label} unbounded at 0+ with singular rho; "
                              "use s_hat_regularized")
    constant = f.f_at_1 * float(m.sum())
    linear = f.fprime_at_1 * float(m @ (x - 1.0))
    quadratic = f.c * float(m @ (x - 1.0) ** 2)
    sq = (x - 1.0) ** 2
    terms = [(float(s), float(w * (m @ (sq / (x + s)))))
             for s, w in zip(measure.s, measure.w)]
    integral_total = float(sum(t for _, t in terms))
    value = constant + linear + quadratic + integral_total
    breakdown = {
        "constant": constant,
        "linear": linear,
        "quadratic": quadratic,
        "integral_total": integral_total,
        "integral_terms": terms,
    }
    return DivergenceResult(value=value, method="integral", term_breakdown=breakdown)


def s_hat_regularized(
    rho: DensityState,
    sigma: DensityState,
    f: OperatorConvexFunction,
    schedule: tuple[float, ...] = DEFAULT_EPSILONS,
    conv_tol: float = CONV_TOL,
) -> DivergenceResult:
    """Limit of S_f(rho + eps I || sigma + eps I) along a decreasing schedule.

    The perturbed states are not renormalized.  Convergence is declared when
    successive values differ by less than conv_tol (relative); otherwise the
    result is +inf with the diverging trace attached.
    """
    eps = tuple(float(e) for e in schedule)
    if not eps or any(e <= 0 for e in eps) or any(a >= b for a, b in zip(eps[1:], eps)):
        raise DomainViolation("epsilon schedule must be strictly decreasing and positive")
    n = rho.dim
    eye = np.eye(n)
    trace: list[tuple[float, float]] = []
    for e in eps:
        try:
            v = s_hat_direct_raw(rho.matrix + e * eye, sigma.matrix + e * eye, f)
        except (OverflowError, FloatingPointError):
            v = math.inf
        trace.append((e, v))
    values = [v for _, v in trace]
    converged = (
        all(math.isfinite(v) for v in values[-2:])
        and abs(values[-1] - values[-2]) <= conv_tol * max(1.0, abs(values[-1]))
    )
    value = values[-1] if converged else math.inf
    return DivergenceResult(value=value, method="regularized", epsilon_trace=trace)


def compute_divergence(
    rho: DensityState,
    sigma: DensityState,
    f: OperatorConvexFunction,
    schedule: tuple[float, ...] = DEFAULT_EPSILONS,
) -> DivergenceResult:
    """Direct evaluation when admissible, else the regularized route."""
    if sigma.full_rank:
        try:
            return s_hat_direct(rho, sigma, f)
        except DomainViolation:
            pass
    return s_hat_regularized(rho, sigma, f, schedule=schedule)


# ---------------------------------------------------------------------------
# hockey-stick comparison quantities

def hockey_stick(rho: DensityState, sigma: DensityState, s: float) -> float:
    """E_s = Tr[(rho - s sigma)_+], the hockey-stick divergence."""
    if s < 0:
        raise DomainViolation(f"s must be nonnegative, got {s}")
    w = np.linalg.eigvalsh(rho.matrix - s * sigma.matrix)
    return float(np.maximum(w, 0.0).sum())


@dataclass(frozen=True)
class QuadratureSpec:
    """Truncation and tolerance settings for the comparison integral."""

    s_max: float = 1e6
    tail_bound: float = 1e-9
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    limit: int = 200


def _positive_part_trace(mat: np.ndarray) -> float:
    return float(np.maximum(np.linalg.eigvalsh(mat), 0.0).sum())


def _quad(fun, lo, hi, points, spec: QuadratureSpec) -> tuple[float, float]:
    pts = sorted(p for p in points if lo < p < hi)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(fun, lo, hi, points=pts or None,
                             limit=spec.limit, epsabs=spec.abs_tol,
                             epsrel=spec.rel_tol, full_output=1)
    val, err = out[0], out[1]
    if len(out) > 3:
        raise QuadratureNotConverged(f"quadrature warning on [{lo}, {hi}]: {out[3]}")
    return val, err


def d_f_hockey(
    rho: DensityState,
    sigma: DensityState,
    f: OperatorConvexFunction,
    quad: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Comparison f-divergence built from hockey-stick values:

        integral over s in (1, inf) of f''(s) E_s(rho||sigma)
      + integral over s in (1, inf) of s^{-3} f''(1/s) E_s(sigma||rho),

    with the second term substituted u = 1/s so it becomes
    integral over u in (0, 1) of f''(u) Tr[(u sigma - rho)_+], avoiding the
    1/s^3 weight near infinity.  Requires f'' in closed form.
    """
    rm, sm = rho.matrix, sigma.matrix
    d2 = f.deriv2

    def e_ratio_points() -> np.ndarray:
        # kinks of both integrands sit at the spectrum of sigma^{-1/2} rho sigma^{-1/2}
        x, _ = relative_spectrum(rm, sm)
        return x

    if not sigma.full_rank:
        raise SingularSigma("comparison integral needs full-rank sigma")
    kinks = e_ratio_points()
    support_edge = float(kinks.max())

    hi1 = min(quad.s_max, max(1.0, support_edge))
    tail_e = _positive_part_trace(rm - quad.s_max * sm)
    if support_edge > quad.s_max and tail_e > quad.tail_bound:
        raise QuadratureNotConverged(
            f"E_s does not vanish before s_max={quad.s_max}: E={tail_e:.3e}"
        )

    def integrand_high(s: float) -> float:
        e = _positive_part_trace(rm - s * sm)
        if e == 0.0:
            return 0.0
        return float(d2(np.asarray(s, dtype=float))) * e

    def integrand_low(u: float) -> float:
        if u <= 0.0:
            return 0.0
        e = _positive_part_trace(u * sm - rm)
        if e == 0.0:
            return 0.0
        return float(d2(np.asarray(u, dtype=float))) * e

    term1 = err1 = 0.0
    if hi1 > 1.0 + 1e-12:  # degenerate interval means E_s vanishes on s >= 1
        term1, err1 = _quad(integrand_high, 1.0, hi1, kinks, quad)
    term2, err2 = _quad(integrand_low, 0.0, 1.0, kinks, quad)

    value = term1 + term2
    total_err = err1 + err2
    if total_err > max(quad.abs_tol * 1e3, quad.rel_tol * abs(value) * 1e3, 1e-9):
        raise QuadratureNotConverged(
            f"estimated quadrature error {total_err:.3e} too large for value {value:.6e}"
        )
    return float(value)
