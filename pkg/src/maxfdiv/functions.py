"""Catalog of operator convex functions on (0, inf).

Each record carries the scalar evaluator together with its canonical
integral-representation data

    f(x) = f(1) + f'(1)(x-1) + c(x-1)^2 + integral (x-1)^2/(x+s) dlam(s),

where c >= 0 and lam is a positive measure on [0, inf) with
integral 1/(1+s) dlam(s) finite.  Exact measures (square, pure_kernel) are
stored as atoms; the remaining measures are smooth densities discretized by
Gauss rules under the substitution u = s/(1+s), which maps [0, inf) onto
[0, 1) and removes the need for tail truncation:

    t_log_t     dlam = s/(1+s)^2 ds          -> Gauss-Legendre in u
    neg_log     dlam = 1/(1+s)^2 ds          -> Gauss-Legendre in u
    power_alpha dlam = |sin(pi a)|/pi * s^a/(1+s)^2 ds
                                              -> Gauss-Jacobi in u, weight
                                                 u^a (1-u)^(1-a)

The module also hosts the three two-variable rearrangement kernels whose
mixed-partial signs drive the co-sorted/anti-sorted pairing results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from .errors import (
    AlphaOutOfOperatorConvexRange,
    DomainViolation,
    MeasureUnavailable,
    UnknownFunction,
)

DEFAULT_QUAD_NODES = 256
REP_TOL_EXACT = 1e-8
REP_TOL_QUADRATURE = 1e-4

_EMPTY = np.zeros(0)


@dataclass(frozen=True)
class RepresentationMeasure:
    """Nodes and weights for the measure lam; kind in {discrete, quadrature, none}."""

    kind: str
    s: np.ndarray = field(default_factory=lambda: _EMPTY)
    w: np.ndarray = field(default_factory=lambda: _EMPTY)
    tail_bound: float = 0.0

    @property
    def is_empty(self) -> bool:
        return self.s.size == 0

    @property
    def s_max(self) -> float:
        return float(self.s.max()) if self.s.size else 0.0

    def kernel_integral(self, x: np.ndarray | float) -> np.ndarray | float:
        """Sum of w * (x-1)^2 / (x+s) over the nodes."""
        if self.kind == "none":
            raise MeasureUnavailable("function has no representation measure")
        if self.is_empty:
            return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        xa = np.asarray(x, dtype=float)
        val = ((xa[..., None] - 1.0) ** 2 / (xa[..., None] + self.s) * self.w).sum(axis=-1)
        return val if np.ndim(x) else float(val)


NO_MEASURE = RepresentationMeasure(kind="none")


@dataclass(frozen=True)
class OperatorConvexFunction:
    """Scalar operator convex function plus representation data.

    limit_at_zero is the (finite) limit of f at 0+ when it exists, else None;
    slope_at_infinity is lim f(t)/t in [0, inf], used when a zero eigenvalue
    of the reference state meets a positive eigenvalue of the other state.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    deriv2: Callable[[np.ndarray], np.ndarray]
    f_at_1: float
    fprime_at_1: float
    c: float
    measure: RepresentationMeasure
    limit_at_zero: float | None
    slope_at_infinity: float
    param: float | None = None
    domain: tuple[float, float] = (0.0, math.inf)

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    @property
    def label(self) -> str:
        if self.param is None:
            return self.name
        return f"{self.name}:{self.param:g}"

    def spec_dict(self) -> dict:
        d: dict = {"name": self.name}
        if self.name == "power_alpha":
            d["alpha"] = self.param
        elif self.name == "pure_kernel":
            d["s0"] = self.param
        return d

    def eval_spectrum(self, x: np.ndarray, zero_tol: float = 0.0) -> np.ndarray:
        """Evaluate on a spectrum that may contain (numerical) zeros.

        Entries within zero_tol of 0 use limit_at_zero; if the limit does not
        exist the evaluation is a DomainViolation.  Negative entries beyond
        zero_tol always violate the domain.
        """
        x = np.asarray(x, dtype=float)
        zero = x <= zero_tol
        if np.any(x < -abs(zero_tol)):
            raise DomainViolation(f"{self.label}: negative spectrum point {x.min():.3e}")
        if np.any(zero):
            if self.limit_at_zero is None:
                raise DomainViolation(f"{self.label} is unbounded at 0+; spectrum touches 0")
            out = np.empty_like(x)
            out[zero] = self.limit_at_zero
            out[~zero] = self.fn(x[~zero])
            return out
        return self.fn(x)


def representation_eval(f: OperatorConvexFunction, x: float) -> float:
    """Right side of the integral representation at a scalar x > 0."""
    if x <= 0:
        raise DomainViolation(f"x must be positive, got {x}")
    if f.measure.kind == "none":
        raise MeasureUnavailable(f"{f.label} carries no representation measure")
    base = f.f_at_1 + f.fprime_at_1 * (x - 1.0) + f.c * (x - 1.0) ** 2
    return float(base + f.measure.kernel_integral(x))


# ---------------------------------------------------------------------------
# quadrature helpers (u = s/(1+s) substitution)

@lru_cache(maxsize=None)
def _gl_unit(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(nodes)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def _jacobi_unit(nodes: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    # weight (1-u)^a * u^b on (0, 1)
    x, w = roots_jacobi(nodes, a, b)
    return (x + 1.0) / 2.0, w / 2.0 ** (a + b + 1.0)


def _probe_tail_bound(build, nodes: int) -> float:
    """Declared quadrature error: node-doubling residual on probe points, x10."""
    coarse, fine = build(nodes), build(2 * nodes)
    probes = np.array([1e-3, 1e-1, 0.5, 2.0, 10.0, 1e3])
    diff = np.abs(coarse.kernel_integral(probes) - fine.kernel_integral(probes))
    return float(max(diff.max() * 10.0, 1e-15))


def _measure_tlogt(nodes: int) -> RepresentationMeasure:
    u, w = _gl_unit(nodes)
    return RepresentationMeasure(kind="quadrature", s=u / (1.0 - u), w=u / (1.0 - u) * w)


def _measure_neglog(nodes: int) -> RepresentationMeasure:
    u, w = _gl_unit(nodes)
    return RepresentationMeasure(kind="quadrature", s=u / (1.0 - u), w=w.copy())


def _measure_power(alpha: float, nodes: int) -> RepresentationMeasure:
    k = abs(math.sin(math.pi * alpha)) / math.pi
    u, w = _jacobi_unit(nodes, 1.0 - alpha, alpha)
    return RepresentationMeasure(kind="quadrature", s=u / (1.0 - u), w=k * w / (1.0 - u))


@lru_cache(maxsize=None)
def _built_measure(name: str, param: float | None, nodes: int) -> RepresentationMeasure:
    if name == "t_log_t":
        build = _measure_tlogt
    elif name == "neg_log":
        build = _measure_neglog
    elif name == "power_alpha":
        def build(n, a=param):
            return _measure_power(a, n)
    else:
        raise UnknownFunction(name)
    m = build(nodes)
    tail = _probe_tail_bound(build, nodes)
    return RepresentationMeasure(kind=m.kind, s=m.s, w=m.w, tail_bound=tail)


# ---------------------------------------------------------------------------
# catalog

def _t_log_t(nodes: int) -> OperatorConvexFunction:
    return OperatorConvexFunction(
        name="t_log_t",
        fn=lambda x: x * np.log(x),
        deriv=lambda x: np.log(x) + 1.0,
        deriv2=lambda x: 1.0 / x,
        f_at_1=0.0,
        fprime_at_1=1.0,
        c=0.0,
        measure=_built_measure("t_log_t", None, nodes),
        limit_at_zero=0.0,
        slope_at_infinity=math.inf,
    )


def _neg_log(nodes: int) -> OperatorConvexFunction:
    return OperatorConvexFunction(
        name="neg_log",
        fn=lambda x: -np.log(x),
        deriv=lambda x: -1.0 / x,
        deriv2=lambda x: 1.0 / x ** 2,
        f_at_1=0.0,
        fprime_at_1=-1.0,
        c=0.0,
        measure=_built_measure("neg_log", None, nodes),
        limit_at_zero=None,
        slope_at_infinity=0.0,
    )


def _square() -> OperatorConvexFunction:
    # exact: x^2 = 1 + 2(x-1) + (x-1)^2
    return OperatorConvexFunction(
        name="square",
        fn=lambda x: x ** 2,
        deriv=lambda x: 2.0 * x,
        deriv2=lambda x: 2.0 * np.ones_like(x),
        f_at_1=1.0,
        fprime_at_1=2.0,
        c=1.0,
        measure=RepresentationMeasure(kind="discrete"),
        limit_at_zero=0.0,
        slope_at_infinity=math.inf,
    )


def _pure_kernel(s0: float) -> OperatorConvexFunction:
    if s0 < 0:
        raise DomainViolation(f"pure_kernel node must satisfy s0 >= 0, got {s0}")
    return OperatorConvexFunction(
        name="pure_kernel",
        fn=lambda x: (x - 1.0) ** 2 / (x + s0),
        deriv=lambda x: (x - 1.0) * (x + 2.0 * s0 + 1.0) / (x + s0) ** 2,
        deriv2=lambda x: 2.0 * (1.0 + s0) ** 2 / (x + s0) ** 3,
        f_at_1=0.0,
        fprime_at_1=0.0,
        c=0.0,
        measure=RepresentationMeasure(kind="discrete", s=np.array([s0]), w=np.array([1.0])),
        limit_at_zero=(1.0 / s0) if s0 > 0 else None,
        slope_at_infinity=1.0,
        param=float(s0),
    )


def _power_alpha(alpha: float, nodes: int) -> OperatorConvexFunction:
    """sign-adjusted power t^alpha, operator convex on the admitted range.

    For alpha in (0,1) the operator convex choice is -t^alpha; for
    alpha in (-1,0) and (1,2] it is +t^alpha.
    """
    if not (-1.0 < alpha < 0.0 or 0.0 < alpha < 1.0 or 1.0 < alpha <= 2.0):
        raise AlphaOutOfOperatorConvexRange(
            f"alpha={alpha} outside (-1,0) | (0,1) | (1,2]"
        )
    sgn = -1.0 if 0.0 < alpha < 1.0 else 1.0
    if alpha == 2.0:
        measure = RepresentationMeasure(kind="discrete")
        c = 1.0
    else:
        measure = _built_measure("power_alpha", alpha, nodes)
        c = 0.0
    return OperatorConvexFunction(
        name="power_alpha",
        fn=lambda x: sgn * x ** alpha,
        deriv=lambda x: sgn * alpha * x ** (alpha - 1.0),
        deriv2=lambda x: sgn * alpha * (alpha - 1.0) * x ** (alpha - 2.0),
        f_at_1=sgn,
        fprime_at_1=sgn * alpha,
        c=c,
        measure=measure,
        limit_at_zero=0.0 if alpha > 0 else None,
        slope_at_infinity=math.inf if alpha > 1 else 0.0,
        param=float(alpha),
    )


CATALOG_NAMES = ("t_log_t", "neg_log", "square", "power_alpha", "pure_kernel")


def catalog_lookup(
    name: str,
    alpha: float | None = None,
    s0: float | None = None,
    nodes: int = DEFAULT_QUAD_NODES,
) -> OperatorConvexFunction:
    """Fetch a cataloged function; power_alpha needs alpha, pure_kernel needs s0."""
    if name == "t_log_t":
        return _t_log_t(nodes)
    if name == "neg_log":
        return _neg_log(nodes)
    if name == "square":
        return _square()
    if name == "power_alpha":
        if alpha is None:
            raise UnknownFunction("power_alpha requires the exponent alpha")
        return _power_alpha(float(alpha), nodes)
    if name == "pure_kernel":
        if s0 is None:
            raise UnknownFunction("pure_kernel requires the node s0")
        return _pure_kernel(float(s0))
    raise UnknownFunction(f"no cataloged function named {name!r}")


def parse_function_spec(spec: str | dict, nodes: int = DEFAULT_QUAD_NODES) -> OperatorConvexFunction:
    """Parse 'name' or 'name:param' (CLI form) or a spec dict."""
    if isinstance(spec, dict):
        return catalog_lookup(
            spec.get("name", ""), alpha=spec.get("alpha"), s0=spec.get("s0"), nodes=nodes
        )
    name, _, param = spec.partition(":")
    value = None
    if param:
        try:
            value = float(param)
        except ValueError:
            raise UnknownFunction(f"bad parameter {param!r} in spec {spec!r}") from None
    if name == "power_alpha":
        return catalog_lookup(name, alpha=value, nodes=nodes)
    if name == "pure_kernel":
        return catalog_lookup(name, s0=value, nodes=nodes)
    if value is not None:
        raise UnknownFunction(f"{name} takes no parameter")
    return catalog_lookup(name, nodes=nodes)


# ---------------------------------------------------------------------------
# rearrangement kernels

class KernelKind(str, Enum):
    QUOTIENT = "quotient"     # f(d, r) = d r^2 / (d r + s)
    RHO_TERM = "rho_term"     # f(d, r) = r / (d r + s)
    SIGMA_TERM = "sigma_term"  # f(a, r) = 1 / (r + s a)


def kernel_eval(kind: KernelKind, first: float, second: float, s: float) -> float:
    d, r = first, second
    if kind == KernelKind.QUOTIENT:
        return d * r * r / (d * r + s)
    if kind == KernelKind.RHO_TERM:
        return r / (d * r + s)
    if kind == KernelKind.SIGMA_TERM:
        return 1.0 / (r + s * d)
    raise UnknownFunction(f"unknown kernel {kind!r}")


def kernel_cross_partial(kind: KernelKind, first: float, second: float, s: float) -> float:
    """Closed-form mixed second partial of the kernel.

    Signs for s > 0: quotient and sigma_term positive (supermodular),
    rho_term negative (submodular).
    """
    d, r = first, second
    if kind == KernelKind.QUOTIENT:
        return 2.0 * r * s * s / (d * r + s) ** 3
    if kind == KernelKind.RHO_TERM:
        return -2.0 * r * s / (d * r + s) ** 3
    if kind == KernelKind.SIGMA_TERM:
        return 2.0 * s / (r + s * d) ** 3
    raise UnknownFunction(f"unknown kernel {kind!r}")


def is_supermodular_kind(kind: KernelKind) -> bool:
    return kind in (KernelKind.QUOTIENT, KernelKind.SIGMA_TERM)


def exchange_inequality_check(
    kind: KernelKind,
    d1: float,
    d2: float,
    r1: float,
    r2: float,
    s: float,
    slack: float = 1e-12,
) -> bool:
    """Four-term exchange inequality in the kernel's modularity direction.

    For ordered arguments d1 >= d2, r1 >= r2: supermodular kernels satisfy
    f(d1,r1) + f(d2,r2) >= f(d1,r2) + f(d2,r1); submodular kernels reverse it.
    """
    if d1 < d2 or r1 < r2:
        raise DomainViolation("arguments must be ordered: d1 >= d2 and r1 >= r2")
    same = kernel_eval(kind, d1, r1, s) + kernel_eval(kind, d2, r2, s)
    cross = kernel_eval(kind, d1, r2, s) + kernel_eval(kind, d2, r1, s)
    scale = max(1.0, abs(same), abs(cross))
    if is_supermodular_kind(kind):
        return same >= cross - slack * scale
    return cross >= same - slack * scale
