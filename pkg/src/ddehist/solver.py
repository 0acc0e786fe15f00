"""Step-by-step solution of x'(t) = f(x(t - r)) from an integrable history.

On each step of length r the delayed argument refers only to already-known
values, so the equation reduces to an explicit integral.  The integrand
f(x(s - r)) is piecewise smooth with kinks exactly at the delayed images of
existing breakpoints; the solver cuts each step there, interpolates the
integrand per cut at Chebyshev points, and antidifferentiates the interpolant
in closed form.  Because each step re-interpolates at a fixed node count, the
polynomial degree of trajectory pieces never grows with the step index.

Interpolation nodes are strictly interior to the cut intervals, so the
trajectory depends on the history only through its almost-everywhere class
and its value at 0, exactly like the underlying equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .funcrep import (
    DEFAULT_QUADRATURE,
    PiecewiseFunction,
    QuadratureConfig,
    _cheb_interp_matrix,
    _cheb_nodes,
    _scale_tol,
)
from .histspace import (
    HistoryConfig,
    HistoryElement,
    _check,
    history_segment,
    static_prolongation,
)
from .nonlinear import Nonlinearity

__all__ = ["Problem", "Trajectory", "solve", "solve_step", "step_edges"]


@dataclass(frozen=True, eq=False)
class Problem:
    """A delay equation instance: space, right-hand side, delay, history."""

    cfg: HistoryConfig
    nl: Nonlinearity
    r: float
    phi: HistoryElement

    def __post_init__(self):
        if not 0.0 < self.r <= self.cfg.R + 1e-12 * max(1.0, self.cfg.R):
            raise ValueError("delay must satisfy 0 < r <= R")
        if self.nl.dim != self.cfg.N:
            raise ValueError("nonlinearity dimension does not match the space")
        _check(self.phi, self.cfg)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A solved trajectory on [-R, horizon].

    integration_defect is the largest sampled residual |x'(t) - f(x(t - r))|
    on the solved part, a direct measure of how well the interpolated
    integrands matched the true ones.
    """

    problem: Problem
    horizon: float
    x: PiecewiseFunction
    step_boundaries: np.ndarray
    integration_defect: float

    def history_at(self, t: float) -> HistoryElement:
        return history_segment(self.x, t, self.problem.cfg.R)

    def deviation(self) -> PiecewiseFunction:
        """x minus the static prolongation of the history.

        The result vanishes on [-R, 0] and is continuous; it isolates the
        part of the trajectory generated by integration.
        """
        return self.x - static_prolongation(self.problem.phi, self.horizon)

    def continuity_defect(self) -> float:
        """Largest one-sided value gap at breakpoints inside (0, horizon]."""
        x = self.x
        worst = 0.0
        tol = _scale_tol(*x.domain)
        for i in range(x.n_pieces - 1):
            seam = x.breakpoints[i + 1]
            if seam <= tol:
                continue
            left = _cheb.chebval(1.0, x.coeffs[i])
            right = _cheb.chebval(-1.0, x.coeffs[i + 1])
            worst = max(worst, float(np.linalg.norm(left - right)))
        final = _cheb.chebval(1.0, x.coeffs[-1])
        worst = max(worst, float(np.linalg.norm(final - x.endpoint_value)))
        return worst


def step_edges(T: float, r: float) -> np.ndarray:
    """Partition of [0, T] at multiples of r, with a truncated last step."""
    tol = 1e-12 * max(1.0, T)
    count = int(np.floor(T / r + 1e-12))
    edges = [i * r for i in range(count + 1)]
    if T - edges[-1] > tol:
        edges.append(T)
    else:
        edges[-1] = T
    return np.array(edges)


def solve(
    problem: Problem, T: float, quad: QuadratureConfig = DEFAULT_QUADRATURE
) -> Trajectory:
    """Solve on [0, T] and return the trajectory on [-R, T]."""
    if not T > 0:
        raise ValueError("horizon must be positive")
    r = problem.r
    rep = problem.phi.rep
    breakpoints = list(rep.breakpoints)
    blocks = list(rep.coeffs)
    value = np.array(rep.endpoint_value)
    xcur = rep
    nodes = _cheb_nodes(quad.nodes_per_piece)
    fit = _cheb_interp_matrix(quad.nodes_per_piece)
    edges = step_edges(T, r)
    for t0, t1 in zip(edges[:-1], edges[1:]):
        tol = _scale_tol(breakpoints[0], t1)
        shifted = xcur.breakpoints + r
        inner = shifted[(shifted > t0 + tol) & (shifted < t1 - tol)]
        partition = np.concatenate(([t0], inner, [t1]))
        for c, d in zip(partition[:-1], partition[1:]):
            halfwidth = 0.5 * (d - c)
            tq = 0.5 * (c + d) + halfwidth * nodes
            rhs = problem.nl.fn(xcur(tq - r))
            integ = _cheb.chebint(fit @ rhs, lbnd=-1, scl=halfwidth, axis=0)
            integ[0] += value
            breakpoints.append(float(d))
            blocks.append(integ)
            value = np.atleast_1d(_cheb.chebval(1.0, integ))
        xcur = PiecewiseFunction(np.array(breakpoints), tuple(blocks), value)
    defect = _integration_defect(xcur, problem, quad)
    return Trajectory(problem, float(T), xcur, edges, defect)


def solve_step(problem: Problem, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> Trajectory:
    """Solve exactly one step, up to the delay."""
    return solve(problem, problem.r, quad)


def _integration_defect(
    x: PiecewiseFunction, problem: Problem, quad: QuadratureConfig
) -> float:
    probe = _cheb_nodes(5)
    worst = 0.0
    for i in range(x.n_pieces):
        c, d = x.piece_interval(i)
        if c < 0.0:
            continue
        halfwidth = 0.5 * (d - c)
        tq = 0.5 * (c + d) + halfwidth * probe
        deriv = _cheb.chebval(probe, _cheb.chebder(x.coeffs[i], axis=0)).T / halfwidth
        rhs = problem.nl.fn(x(tq - problem.r))
        worst = max(worst, float(np.abs(deriv - rhs).max()))
    return worst
