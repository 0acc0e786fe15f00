"""Composition operators sending g to f(g(.)) between Lebesgue spaces.

On a finite interval, a pointwise map f of polynomial growth order alpha
carries L^(alpha q) into L^q; with a Jacobian of growth order alpha it does
so differentiably from L^((alpha+1) q), the derivative at g acting as
multiplication by Df(g(.)).  The two exponent regimes are the modes below.
Images stay lazy: norms and gaps are integrated through the composed map
without materializing it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certify import BoundPair, GapTable, RemainderTable
from .corpus import piecewise_constant
from .funcrep import (
    DEFAULT_QUADRATURE,
    LazyComposition,
    PiecewiseFunction,
    QuadratureConfig,
    _scale_tol,
    lp_norm,
    stack,
)
from .nonlinear import Nonlinearity, spectral_norm

__all__ = [
    "CompositionContext",
    "CompositionReport",
    "DerivativeReport",
    "MeasureDomain",
    "apply_derivative",
    "compose",
    "continuity_probe",
    "curvature_image_bound",
    "derivative_gap",
    "smoothness_probe",
]


@dataclass(frozen=True)
class MeasureDomain:
    """A finite interval carrying Lebesgue measure."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.upper > self.lower:
            raise ValueError("domain must have positive length")

    @property
    def measure(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True, eq=False)
class CompositionContext:
    """Exponent bookkeeping for one composition operator.

    In continuity mode the source exponent is alpha * q with alpha the
    growth order of f itself; in smoothness mode it is (alpha + 1) * q with
    alpha the growth order of the Jacobian, which is exactly what makes the
    derivative a bounded multiplier into L^q.
    """

    nl: Nonlinearity
    q: float
    mode: str
    domain: MeasureDomain

    def __post_init__(self):
        if self.mode not in ("continuity", "smoothness"):
            raise ValueError("mode must be 'continuity' or 'smoothness'")
        if self.q < 1.0:
            raise ValueError("target exponent q must be at least 1")
        if self.nl.f_growth is None:
            raise ValueError("nonlinearity does not certify growth of f")
        if self.mode == "smoothness":
            if self.nl.jac is None:
                raise ValueError("smoothness mode needs a jacobian")
            if self.nl.df_growth is None:
                raise ValueError("smoothness mode needs certified jacobian growth")

    @property
    def alpha(self) -> float:
        if self.mode == "continuity":
            return self.nl.f_growth.alpha
        return self.nl.df_growth.alpha

    @property
    def p(self) -> float:
        if self.mode == "continuity":
            return self.alpha * self.q
        return (self.alpha + 1.0) * self.q

    def _accept(self, g: PiecewiseFunction, label: str = "argument") -> None:
        if g.n_components != self.nl.dim:
            raise ValueError(f"{label} has wrong component count")
        a, b = g.domain
        tol = _scale_tol(self.domain.lower, self.domain.upper)
        if abs(a - self.domain.lower) > tol or abs(b - self.domain.upper) > tol:
            raise ValueError(f"{label} does not live on the context domain")


@dataclass(frozen=True, eq=False)
class CompositionReport:
    """A composed image with its measured size and the growth-based bound.

    bound_power dominates the q-th power of the norm; the comparison comes
    from splitting f pointwise into the large-argument power term and the
    constant term.
    """

    image: LazyComposition
    norm: float
    bound_power: float
    q: float

    @property
    def passed(self) -> bool:
        return self.norm**self.q <= self.bound_power + 1e-8


@dataclass(frozen=True, eq=False)
class DerivativeReport:
    """The multiplier image Df(g(.)) h(.) with its size and gain bound."""

    image: LazyComposition
    norm: float
    gain_bound: float
    direction_size: float

    @property
    def passed(self) -> bool:
        return self.norm <= self.gain_bound * self.direction_size + 1e-8


def compose(
    ctx: CompositionContext,
    g: PiecewiseFunction,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> CompositionReport:
    """The image f(g(.)), its L^q size, and the well-definedness bound."""
    ctx._accept(g)
    image = LazyComposition(g, ctx.nl.fn, ctx.nl.dim)
    norm = lp_norm(image, ctx.q, quad)
    growth = ctx.nl.f_growth
    power = growth.alpha * ctx.q
    big = growth.c1**ctx.q * lp_norm(g, power, quad) ** power
    small = growth.c2**ctx.q * ctx.domain.measure
    bound_power = 2.0 ** (ctx.q - 1.0) * (big + small)
    return CompositionReport(image, norm, bound_power, ctx.q)


def continuity_probe(
    ctx: CompositionContext,
    g: PiecewiseFunction,
    direction: PiecewiseFunction,
    count: int,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> GapTable:
    """Output gaps of the composition along g + direction/2^k.

    Input gaps are measured in the source exponent p, output gaps in the
    target exponent q; continuity is certified by decay of the outputs.
    """
    ctx._accept(g)
    ctx._accept(direction, "direction")
    if count < 3:
        raise ValueError("need at least three halvings")
    base_size = lp_norm(direction, ctx.p, quad)
    if base_size < 1e-13:
        raise ValueError("direction must be nonzero")
    m = ctx.nl.dim
    fn = ctx.nl.fn

    def gap_map(values):
        return fn(values[:, :m]) - fn(values[:, m:])

    ins, outs = [], []
    for k in range(count + 1):
        moved = g + direction.scale(2.0**-k)
        paired = stack((moved, g))
        ins.append(lp_norm(moved - g, ctx.p, quad))
        outs.append(lp_norm(LazyComposition(paired, gap_map, m), ctx.q, quad))
    return GapTable(np.array(ins), np.array(outs))


def apply_derivative(
    ctx: CompositionContext,
    g: PiecewiseFunction,
    h: PiecewiseFunction,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> DerivativeReport:
    """The derivative image Df(g(.)) h(.) with the multiplier gain bound."""
    if ctx.mode != "smoothness":
        raise ValueError("derivative requires smoothness-mode exponents")
    ctx._accept(g)
    ctx._accept(h, "direction")
    m = ctx.nl.dim
    jac = ctx.nl.jac

    def multiplier(values):
        return np.einsum("kij,kj->ki", jac(values[:, :m]), values[:, m:])

    image = LazyComposition(stack((g, h)), multiplier, m)
    norm = lp_norm(image, ctx.q, quad)
    gains = LazyComposition(g, lambda v: spectral_norm(jac(v))[:, None], 1)
    gain_bound = lp_norm(gains, ctx.p / ctx.alpha, quad)
    return DerivativeReport(image, norm, gain_bound, lp_norm(h, ctx.p, quad))


def smoothness_probe(
    ctx: CompositionContext,
    g: PiecewiseFunction,
    direction: PiecewiseFunction,
    count: int,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> RemainderTable:
    """Linearization remainders of the composition along a halving schedule."""
    if ctx.mode != "smoothness":
        raise ValueError("smoothness probe requires smoothness-mode exponents")
    ctx._accept(g)
    ctx._accept(direction, "direction")
    if count < 3:
        raise ValueError("need at least three halvings")
    m = ctx.nl.dim
    fn, jac = ctx.nl.fn, ctx.nl.jac

    def remainder_map(values):
        base, step = values[:, :m], values[:, m:]
        linear_part = np.einsum("kij,kj->ki", jac(base), step)
        return fn(base + step) - fn(base) - linear_part

    scales, remainders = [], []
    for k in range(count + 1):
        h = direction.scale(2.0**-k)
        paired = stack((g, h))
        scales.append(lp_norm(h, ctx.p, quad))
        remainders.append(lp_norm(LazyComposition(paired, remainder_map, m), ctx.q, quad))
    return RemainderTable(np.array(scales), np.array(remainders))


def curvature_image_bound(
    ctx: CompositionContext,
    h: PiecewiseFunction,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Taylor bound for the composition remainder when Df is Lipschitz.

    Pointwise the remainder is at most half the Lipschitz constant times
    the squared perturbation, so its L^q size is controlled through the
    doubled exponent 2q.
    """
    lip = ctx.nl.df_lipschitz
    if lip is None:
        raise ValueError("nonlinearity does not certify a jacobian Lipschitz constant")
    return 0.5 * lip * lp_norm(h, 2.0 * ctx.q, quad) ** 2


def derivative_gap(
    ctx: CompositionContext,
    g: PiecewiseFunction,
    g0: PiecewiseFunction,
    probes: int = 12,
    seed: int = 0,
    extra=(),
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> BoundPair:
    """Distance between the derivative multipliers at two base points.

    Probed on step-function directions against the analytic bound, the L^
    (p/alpha) size of the Jacobian gap along the two base points.
    """
    if ctx.mode != "smoothness":
        raise ValueError("derivative gap requires smoothness-mode exponents")
    ctx._accept(g)
    ctx._accept(g0, "base point")
    m = ctx.nl.dim
    jac = ctx.nl.jac
    paired = stack((g, g0))

    def jac_gap(values):
        return spectral_norm(jac(values[:, :m]) - jac(values[:, m:]))[:, None]

    bound = lp_norm(LazyComposition(paired, jac_gap, 1), ctx.p / ctx.alpha, quad)

    def gap_image(h):
        def multiplier(values):
            mats = jac(values[:, :m]) - jac(values[:, m : 2 * m])
            return np.einsum("kij,kj->ki", mats, values[:, 2 * m :])

        return LazyComposition(stack((g, g0, h)), multiplier, m)

    rng = np.random.default_rng(seed)
    span = (ctx.domain.lower, ctx.domain.upper)
    candidates = list(extra)
    for _ in range(int(probes)):
        candidates.append(piecewise_constant(rng, span, n_pieces=8, n_components=m))
    probed = 0.0
    for h in candidates:
        size = lp_norm(h, ctx.p, quad)
        if size < 1e-13:
            continue
        probed = max(probed, lp_norm(gap_image(h), ctx.q, quad) / size)
    return BoundPair(probed, bound)
