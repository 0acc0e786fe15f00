"""Derivative operators for the dependence of trajectories on their histories.

For a C¹ right-hand side, the first-order response of the solution to a
history perturbation chi splits into two parts: the static prolongation of
chi (carrying the perturbed start value forward) and a cumulative integral
applying the Jacobian along the base trajectory's delayed argument,

    t  |->  integral over [0, t] of  Df(phi(s - r)) chi(s - r) ds,

which vanishes on the history interval.  This module builds both parts,
bounds the integral part through the Hoelder inequality, and certifies that
what remains after subtracting the first-order response shrinks faster than
the perturbation.  Horizons are capped at one delay so the base trajectory
argument stays inside the history, where the perturbation lives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .certify import BoundPair, RemainderTable
from .corpus import piecewise_constant
from .funcrep import (
    DEFAULT_QUADRATURE,
    LazyComposition,
    PiecewiseFunction,
    QuadratureConfig,
    _cheb_interp_matrix,
    _cheb_nodes,
    _scale_tol,
    lp_norm,
    stack,
    sup_norm,
)
from .histspace import HistoryElement, _check, static_prolongation
from .nonlinear import holder_conjugate, spectral_norm
from .solver import Problem, solve

__all__ = [
    "DerivativeContext",
    "curvature_remainder_bound",
    "derivative_gap",
    "estimate_operator_norm",
    "frechet_remainder",
    "remainder_function",
    "remainder_schedule",
    "tangent_deviation",
    "tangent_deviation_bound",
    "tangent_trajectory",
]


@dataclass(frozen=True, eq=False)
class DerivativeContext:
    """A problem together with the exponents used for differentiation.

    horizon is the linearization window, at most one delay.  p is the
    exponent of the history space under perturbation; it must dominate
    alpha + 1, where alpha is the certified growth order of the Jacobian.
    q, the Hoelder conjugate of alpha + 1, is where Df along the base
    history must be integrable for the integral part to be bounded.
    """

    problem: Problem
    horizon: float
    p: float

    def __post_init__(self):
        nl = self.problem.nl
        if nl.jac is None:
            raise ValueError("nonlinearity does not provide a jacobian")
        if nl.df_growth is None:
            raise ValueError("nonlinearity does not certify jacobian growth")
        r = self.problem.r
        if not 0.0 < self.horizon <= r + 1e-12 * max(1.0, r):
            raise ValueError("horizon must lie in (0, r]")
        if self.p < self.alpha + 1.0 - 1e-12:
            raise ValueError("exponent p must be at least alpha + 1")

    @property
    def alpha(self) -> float:
        return self.problem.nl.df_growth.alpha

    @property
    def q(self) -> float:
        return holder_conjugate(self.alpha + 1.0)


def tangent_deviation(
    ctx: DerivativeContext,
    chi: HistoryElement,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> PiecewiseFunction:
    """The integral part of the first-order response, zero on the history.

    Linear in chi; the integrand is interpolated on the union of the shifted
    breakpoints of the base history and of the direction, so piecewise
    polynomial data integrates exactly up to the node count.
    """
    pb = ctx.problem
    _check(chi, pb.cfg)
    phi_rep = pb.phi.rep
    chi_rep = chi.rep
    r, T, R = pb.r, ctx.horizon, pb.cfg.R
    n = phi_rep.n_components
    tol = _scale_tol(-R, T)
    cuts = np.concatenate([phi_rep.breakpoints + r, chi_rep.breakpoints + r])
    inner = np.unique(cuts[(cuts > tol) & (cuts < T - tol)])
    if inner.size:
        inner = inner[np.concatenate(([True], np.diff(inner) > tol))]
    partition = np.concatenate(([0.0], inner, [T]))
    nodes = _cheb_nodes(quad.nodes_per_piece)
    fit = _cheb_interp_matrix(quad.nodes_per_piece)
    breakpoints = [-R, 0.0]
    blocks = [np.zeros((1, n))]
    value = np.zeros(n)
    for c, d in zip(partition[:-1], partition[1:]):
        halfwidth = 0.5 * (d - c)
        args = 0.5 * (c + d) + halfwidth * nodes - r
        mats = pb.nl.jacobian(phi_rep(args))
        rates = np.einsum("kij,kj->ki", mats, chi_rep(args))
        integ = _cheb.chebint(fit @ rates, lbnd=-1, scl=halfwidth, axis=0)
        integ[0] += value
        breakpoints.append(float(d))
        blocks.append(integ)
        value = np.atleast_1d(_cheb.chebval(1.0, integ))
    return PiecewiseFunction(np.array(breakpoints), tuple(blocks), value)


def tangent_trajectory(
    ctx: DerivativeContext,
    chi: HistoryElement,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> PiecewiseFunction:
    """The full first-order response: prolongation of chi plus integral part."""
    return static_prolongation(chi, ctx.horizon) + tangent_deviation(ctx, chi, quad)


def tangent_deviation_bound(
    ctx: DerivativeContext, quad: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """Analytic gain bound for the integral part: the L^q size of Df along phi.

    By Hoelder, the integral part is dominated in sup norm by this number
    times the L^(alpha+1) size of the direction.
    """
    pb = ctx.problem
    jac = pb.nl.jacobian
    gains = LazyComposition(pb.phi.rep, lambda v: spectral_norm(jac(v))[:, None], 1)
    return lp_norm(gains, ctx.q, quad)


def estimate_operator_norm(
    op,
    norm_in,
    norm_out,
    cfg,
    probes: int = 12,
    seed: int = 0,
    extra=(),
) -> float:
    """Empirical lower bound for an operator norm via seeded step-function probes.

    Probes are random piecewise-constant histories (dense enough in every
    L^p and integrated exactly by the quadrature), plus any caller-supplied
    directions in extra.
    """
    rng = np.random.default_rng(seed)
    candidates = list(extra)
    for _ in range(int(probes)):
        candidates.append(
            HistoryElement(
                piecewise_constant(rng, (-cfg.R, 0.0), n_pieces=8, n_components=cfg.N)
            )
        )
    best = 0.0
    for chi in candidates:
        size = norm_in(chi)
        if size < 1e-13:
            continue
        best = max(best, norm_out(op(chi)) / size)
    return best


def remainder_function(
    ctx: DerivativeContext,
    chi: HistoryElement,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> PiecewiseFunction:
    """Perturbed trajectory minus base trajectory minus first-order response."""
    pb = ctx.problem
    base = solve(pb, ctx.horizon, quad).x
    moved = solve(Problem(pb.cfg, pb.nl, pb.r, pb.phi + chi), ctx.horizon, quad).x
    return moved - base - tangent_trajectory(ctx, chi, quad)


def frechet_remainder(
    ctx: DerivativeContext,
    chi: HistoryElement,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Sup norm of the linearization remainder over history plus horizon."""
    return sup_norm(remainder_function(ctx, chi, quad), quad)


def remainder_schedule(
    ctx: DerivativeContext,
    chi0: HistoryElement,
    count: int,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> RemainderTable:
    """Linearization remainders along the halving schedule chi0, chi0/2, ...

    The first-order response is computed once and rescaled (it is linear by
    construction); each row re-solves the perturbed problem.
    """
    if count < 3:
        raise ValueError("need at least three halvings")
    pb = ctx.problem
    base = solve(pb, ctx.horizon, quad).x
    tangent0 = tangent_trajectory(ctx, chi0, quad)
    scales = []
    remainders = []
    for k in range(count + 1):
        factor = 2.0**-k
        chi = chi0.scale(factor)
        moved = solve(Problem(pb.cfg, pb.nl, pb.r, pb.phi + chi), ctx.horizon, quad).x
        diff = moved - base - tangent0.scale(factor)
        scales.append(lp_norm(chi.rep, ctx.alpha + 1.0, quad))
        remainders.append(sup_norm(diff, quad))
    return RemainderTable(np.array(scales), np.array(remainders))


def curvature_remainder_bound(
    ctx: DerivativeContext,
    chi: HistoryElement,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Quadratic remainder bound available when Df is Lipschitz.

    Taylor with the integral form of the remainder gives half the Lipschitz
    constant times the squared L^2 size of the perturbation.
    """
    lip = ctx.problem.nl.df_lipschitz
    if lip is None:
        raise ValueError("nonlinearity does not certify a jacobian Lipschitz constant")
    return 0.5 * lip * lp_norm(chi.rep, 2.0, quad) ** 2


def derivative_gap(
    ctx: DerivativeContext,
    phi0: HistoryElement,
    probes: int = 12,
    seed: int = 0,
    extra=(),
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> BoundPair:
    """Distance between the integral parts at two base histories.

    The probed operator gap must stay below the L^q size of the Jacobian
    difference along the two histories, which is what makes the derivative
    continuous in the base point.
    """
    pb = ctx.problem
    ctx0 = DerivativeContext(Problem(pb.cfg, pb.nl, pb.r, phi0), ctx.horizon, ctx.p)
    n = pb.cfg.N
    jac = pb.nl.jacobian
    paired = stack((pb.phi.rep, phi0.rep))

    def jac_gap(values):
        return spectral_norm(jac(values[:, :n]) - jac(values[:, n:]))[:, None]

    bound = lp_norm(LazyComposition(paired, jac_gap, 1), ctx.q, quad)
    probed = estimate_operator_norm(
        lambda chi: tangent_deviation(ctx, chi, quad) - tangent_deviation(ctx0, chi, quad),
        norm_in=lambda chi: lp_norm(chi.rep, ctx.alpha + 1.0, quad),
        norm_out=lambda gap: sup_norm(gap, quad),
        cfg=pb.cfg,
        probes=probes,
        seed=seed,
        extra=extra,
    )
    return BoundPair(probed, bound)
