"""Closed-form orbit extremal values, extremizers, and oracles.

Over the unitary orbit {U* sigma U}, the divergence S_f(rho || U* sigma U)
is minimized by pairing both spectra in decreasing order and maximized by
pairing decreasing rho-eigenvalues with increasing sigma-eigenvalues.  At
those configurations the states commute and the value is the classical sum

    sum_i mu_i f(r_i / mu_i)

over the paired spectra.  The extremizing unitaries are assembled from the
states' diagonalizers; a permutation brute force and interval sampling act
as independent oracles.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from .divergence import (
    CONV_TOL,
    DEFAULT_EPSILONS,
    relative_spectrum,
    s_hat_direct_raw,
)
from .errors import DimensionTooLargeForBruteForce, DomainViolation, SingularSigma
from .functions import OperatorConvexFunction
from .io import matrix_from_dict, matrix_to_dict
from .linalg import DensityState, TOL_RANK, eig_hermitian, haar_unitary

BRUTE_FORCE_MAX_DIM = 8
TIE_TOL = 1e-12  # spectra equal within this are one degenerate block


@dataclass(frozen=True)
class Pairing:
    """A permutation pairing r_i with mu_{perm[i]}.

    r is the rho spectrum in decreasing order; mu is the sigma spectrum in
    decreasing order; position i of the sum pairs r[i] with mu[perm[i]].
    """

    perm: tuple[int, ...]
    r: np.ndarray
    mu: np.ndarray

    @property
    def paired_mu(self) -> np.ndarray:
        return self.mu[list(self.perm)]

    def to_dict(self) -> dict:
        return {"perm": list(self.perm), "r": self.r.tolist(), "mu": self.mu.tolist()}

    @staticmethod
    def from_dict(d: dict) -> "Pairing":
        return Pairing(perm=tuple(d["perm"]), r=np.asarray(d["r"], dtype=float),
                       mu=np.asarray(d["mu"], dtype=float))


def co_sorted_pairing(r: np.ndarray, mu: np.ndarray) -> Pairing:
    n = len(r)
    return Pairing(perm=tuple(range(n)), r=np.asarray(r, float), mu=np.asarray(mu, float))


def anti_sorted_pairing(r: np.ndarray, mu: np.ndarray) -> Pairing:
    n = len(r)
    return Pairing(perm=tuple(range(n - 1, -1, -1)), r=np.asarray(r, float),
                   mu=np.asarray(mu, float))


def classical_term(r_i: float, mu_i: float, f: OperatorConvexFunction,
                   ztol: float = TOL_RANK) -> float:
    """One summand mu f(r/mu), with zero eigenvalues resolved as limits.

    mu = 0, r > 0 contributes r * lim f(t)/t; mu = r = 0 contributes 0;
    r = 0 uses the limit of f at 0+ (infinite when it does not exist).
    """
    if mu_i <= ztol:
        if r_i <= ztol:
            return 0.0
        slope = f.slope_at_infinity
        return math.inf if math.isinf(slope) else r_i * slope
    ratio = r_i / mu_i
    if ratio <= ztol:
        if f.limit_at_zero is None:
            return math.inf
        return mu_i * f.limit_at_zero
    return mu_i * float(f.fn(np.asarray(ratio)))


def classical_sum(r: np.ndarray, mu_paired: np.ndarray,
                  f: OperatorConvexFunction) -> float:
    """Classical f-divergence sum of two paired positive spectra."""
    return float(sum(classical_term(ri, mi, f) for ri, mi in zip(r, mu_paired)))


def _spectra_desc(rho: DensityState, sigma: DensityState) -> tuple[np.ndarray, np.ndarray]:
    return rho.eigenvalues[::-1].copy(), sigma.eigenvalues[::-1].copy()


def _regularized_classical(r: np.ndarray, mu_paired: np.ndarray,
                           f: OperatorConvexFunction) -> float:
    """Epsilon sweep of the classical sum, for singular spectra."""
    values = []
    for e in DEFAULT_EPSILONS:
        values.append(classical_sum(r + e, mu_paired + e, f))
    if (all(math.isfinite(v) for v in values[-2:])
            and abs(values[-1] - values[-2]) <= CONV_TOL * max(1.0, abs(values[-1]))):
        return values[-1]
    return math.inf


def _pairing_value(r: np.ndarray, mu_paired: np.ndarray,
                   f: OperatorConvexFunction) -> float:
    if mu_paired.min() > TOL_RANK and (r.min() > TOL_RANK or f.limit_at_zero is not None):
        return classical_sum(r, mu_paired, f)
    return _regularized_classical(r, mu_paired, f)


def extremal_unitaries(rho: DensityState, sigma: DensityState) -> tuple[np.ndarray, np.ndarray]:
    """(U_min, U_max): the minimizing and maximizing orbit unitaries.

    U_min = W_desc V_desc*, U_max = W_asc V_desc*, where V, W diagonalize
    rho and sigma in the indicated eigenvalue order.  With degenerate
    spectra these are canonical representatives; certification is by value.
    """
    dec_rho = eig_hermitian(rho.matrix)
    dec_sig = eig_hermitian(sigma.matrix)
    v_desc = dec_rho.diagonalizer_desc
    u_min = dec_sig.diagonalizer_desc @ v_desc.conj().T
    u_max = dec_sig.diagonalizer_asc @ v_desc.conj().T
    return u_min, u_max


def extremal_min(rho: DensityState, sigma: DensityState,
                 f: OperatorConvexFunction) -> tuple[float, np.ndarray]:
    """Orbit minimum of S_f(rho || U* sigma U) and a minimizer U."""
    r, mu = _spectra_desc(rho, sigma)
    u_min, _ = extremal_unitaries(rho, sigma)
    return _pairing_value(r, mu, f), u_min


def extremal_max(rho: DensityState, sigma: DensityState,
                 f: OperatorConvexFunction) -> tuple[float, np.ndarray]:
    """Orbit maximum of S_f(rho || U* sigma U) and a maximizer U."""
    r, mu = _spectra_desc(rho, sigma)
    _, u_max = extremal_unitaries(rho, sigma)
    return _pairing_value(r, mu[::-1], f), u_max


@dataclass(frozen=True)
class BruteForceResult:
    min_value: float
    max_value: float
    argmins: tuple[Pairing, ...]
    argmaxes: tuple[Pairing, ...]


def brute_force_orbit_diagonal(rho: DensityState, sigma: DensityState,
                               f: OperatorConvexFunction,
                               tie_tol: float = TIE_TOL) -> BruteForceResult:
    """Exhaustive sweep of sum_i mu_{perm(i)} f(r_i / mu_{perm(i)}) over all
    permutations.  Ties within tie_tol (relative) are reported as sets."""
    n = rho.dim
    if n > BRUTE_FORCE_MAX_DIM:
        raise DimensionTooLargeForBruteForce(f"n={n} exceeds {BRUTE_FORCE_MAX_DIM}")
    r, mu = _spectra_desc(rho, sigma)
    perms = list(itertools.permutations(range(n)))
    if mu.min() > TOL_RANK and (r.min() > TOL_RANK or f.limit_at_zero is not None):
        perm_arr = np.array(perms)
        mu_p = mu[perm_arr]                      # (n!, n)
        ratios = r[None, :] / mu_p
        ztol = TOL_RANK * max(1.0, float(ratios.max()))
        vals = (mu_p * f.eval_spectrum(ratios, zero_tol=ztol)).sum(axis=1)
    else:
        vals = np.array([_pairing_value(r, mu[list(p)], f) for p in perms])
    vmin, vmax = float(vals.min()), float(vals.max())
    scale = max(1.0, abs(vmin), abs(vmax))
    argmins = tuple(Pairing(perm=perms[i], r=r, mu=mu)
                    for i in np.flatnonzero(vals <= vmin + tie_tol * scale))
    argmaxes = tuple(Pairing(perm=perms[i], r=r, mu=mu)
                     for i in np.flatnonzero(vals >= vmax - tie_tol * scale))
    return BruteForceResult(min_value=vmin, max_value=vmax,
                            argmins=argmins, argmaxes=argmaxes)


@dataclass(frozen=True)
class ClaimComponents:
    """The four scalar sums of the per-node decomposition at a pairing.

    With a_i = 1/mu_{perm(i)} paired against r_i:
      quotient_term  = sum a_i r_i^2 / (a_i r_i + s)
      rho_term       = sum r_i / (a_i r_i + s)      (enters the divergence
                       with weight -2; maximal at the co-sorted pairing)
      sigma_term     = sum a_i^{-1} / (a_i r_i + s)
      quadratic_term = sum a_i r_i^2
    """

    quotient_term: float
    rho_term: float
    sigma_term: float
    quadratic_term: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.quotient_term, self.rho_term, self.sigma_term,
                self.quadratic_term)


def claim_components(pairing: Pairing, s: float) -> ClaimComponents:
    """Evaluate the four component sums for a pairing at node s >= 0."""
    if s < 0:
        raise DomainViolation(f"s must be nonnegative, got {s}")
    r = pairing.r
    m = pairing.paired_mu
    if np.any(r <= 0) or np.any(m <= 0):
        raise DomainViolation("claim components need strictly positive spectra")
    denom = r + s * m
    return ClaimComponents(
        quotient_term=float(np.sum(r * r / denom)),
        rho_term=float(np.sum(r * m / denom)),
        sigma_term=float(np.sum(m * m / denom)),
        quadratic_term=float(np.sum(r * r / m)),
    )


@dataclass
class OrbitExtremalReport:
    """Extremal values, extremizers, pairings, and certification residuals."""

    min_value: float
    max_value: float
    u_min: np.ndarray
    u_max: np.ndarray
    min_pairing: Pairing
    max_pairing: Pairing
    per_s_components: list[dict]
    cert_residual_min: float
    cert_residual_max: float

    def to_dict(self) -> dict:
        enc = lambda v: v if math.isfinite(v) else "inf"
        return {
            "min_value": enc(self.min_value),
            "max_value": enc(self.max_value),
            "u_min": matrix_to_dict(self.u_min),
            "u_max": matrix_to_dict(self.u_max),
            "min_pairing": self.min_pairing.to_dict(),
            "max_pairing": self.max_pairing.to_dict(),
            "per_s_components": self.per_s_components,
            "cert_residual_min": self.cert_residual_min,
            "cert_residual_max": self.cert_residual_max,
        }

    @staticmethod
    def from_dict(d: dict) -> "OrbitExtremalReport":
        dec = lambda v: math.inf if v == "inf" else float(v)
        return OrbitExtremalReport(
            min_value=dec(d["min_value"]),
            max_value=dec(d["max_value"]),
            u_min=matrix_from_dict(d["u_min"]),
            u_max=matrix_from_dict(d["u_max"]),
            min_pairing=Pairing.from_dict(d["min_pairing"]),
            max_pairing=Pairing.from_dict(d["max_pairing"]),
            per_s_components=list(d["per_s_components"]),
            cert_residual_min=float(d["cert_residual_min"]),
            cert_residual_max=float(d["cert_residual_max"]),
        )


DEFAULT_S_PROBES = (0.1, 1.0, 10.0)


def orbit_extremal_report(rho: DensityState, sigma: DensityState,
                          f: OperatorConvexFunction,
                          s_nodes: tuple[float, ...] | None = None) -> OrbitExtremalReport:
    """Assemble the full extremal report and certify the extremizers by value."""
    r, mu = _spectra_desc(rho, sigma)
    min_value, u_min = extremal_min(rho, sigma, f)
    max_value, u_max = extremal_max(rho, sigma, f)
    min_pair = co_sorted_pairing(r, mu)
    max_pair = anti_sorted_pairing(r, mu)

    if s_nodes is None:
        if f.measure.kind == "discrete" and not f.measure.is_empty:
            s_nodes = tuple(float(s) for s in f.measure.s)
        elif f.measure.kind == "quadrature":
            s_nodes = DEFAULT_S_PROBES
        else:
            s_nodes = ()
    rows: list[dict] = []
    if r.min() > TOL_RANK and mu.min() > TOL_RANK:
        for s in s_nodes:
            for label, pair in (("co_sorted", min_pair), ("anti_sorted", max_pair)):
                comp = claim_components(pair, s)
                rows.append({
                    "s": float(s), "pairing": label,
                    "quotient_term": comp.quotient_term,
                    "rho_term": comp.rho_term,
                    "sigma_term": comp.sigma_term,
                    "quadratic_term": comp.quadratic_term,
                })

    def cert(u: np.ndarray, target: float) -> float:
        if not math.isfinite(target) or not sigma.full_rank:
            return float("nan")
        try:
            v = s_hat_direct_raw(rho.matrix, u.conj().T @ sigma.matrix @ u, f)
        except DomainViolation:
            return float("nan")
        return abs(v - target)

    return OrbitExtremalReport(
        min_value=min_value, max_value=max_value,
        u_min=u_min, u_max=u_max,
        min_pairing=min_pair, max_pairing=max_pair,
        per_s_components=rows,
        cert_residual_min=cert(u_min, min_value),
        cert_residual_max=cert(u_max, max_value),
    )


@dataclass
class RangeSample:
    """Sampled coverage of the orbit value interval."""

    interval: tuple[float, float]
    haar_values: np.ndarray
    geodesic_values: np.ndarray
    all_within: bool
    max_gap_fraction: float
    max_jump_fraction: float


def _unitary_log(z: np.ndarray) -> np.ndarray:
    """Skew-Hermitian logarithm of a unitary matrix via Schur form."""
    t, p = schur(z, output="complex")
    theta = np.angle(np.diag(t))
    return (p * (1j * theta)) @ p.conj().T


def range_interval(rho: DensityState, sigma: DensityState,
                   f: OperatorConvexFunction, samples: int,
                   rng: np.random.Generator,
                   geodesic_steps: int = 200,
                   containment_slack: float = 1e-9) -> RangeSample:
    """Haar and geodesic sampling of S_f(rho || U* sigma U) against the
    closed extremal interval.

    The geodesic interpolates U_min -> U_max through U_min exp(t L) with a
    fixed skew-Hermitian generator L, anchoring both endpoints, so sampled
    values trace a continuous path across the whole interval.
    """
    if not sigma.full_rank:
        raise SingularSigma("interval sampling needs full-rank sigma")
    n = rho.dim
    lo, u_min = extremal_min(rho, sigma, f)
    hi, u_max = extremal_max(rho, sigma, f)

    def value_at(u: np.ndarray) -> float:
        return s_hat_direct_raw(rho.matrix, u.conj().T @ sigma.matrix @ u, f)

    haar_vals = np.array([value_at(haar_unitary(n, rng)) for _ in range(samples)])
    gen = _unitary_log(u_min.conj().T @ u_max)
    tgrid = np.linspace(0.0, 1.0, geodesic_steps)
    tw, tv = np.linalg.eigh(1j * gen)  # gen = -i * (tv diag(tw) tv*)
    geo_vals = np.empty(geodesic_steps)
    for k, t in enumerate(tgrid):
        step = (tv * np.exp(-1j * t * tw)) @ tv.conj().T
        geo_vals[k] = value_at(u_min @ step)

    width = hi - lo
    all_vals = np.concatenate([haar_vals, geo_vals, [lo, hi]])
    within = bool(np.all(all_vals >= lo - containment_slack)
                  and np.all(all_vals <= hi + containment_slack))
    if width <= containment_slack:
        gap_frac = 0.0
        jump_frac = 0.0
    else:
        sorted_vals = np.sort(all_vals)
        gap_frac = float(np.diff(sorted_vals).max() / width)
        jump_frac = float(np.abs(np.diff(geo_vals)).max() / width)
    return RangeSample(interval=(lo, hi), haar_values=haar_vals,
                       geodesic_values=geo_vals, all_within=within,
                       max_gap_fraction=gap_frac, max_jump_fraction=jump_frac)
