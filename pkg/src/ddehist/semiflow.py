"""The solution semiflow on the history space and its differentiable structure.

Evolving a history by time t means solving forward and reading off the
final length-R window, including its endpoint value.  Because the equation
only sees the almost-everywhere class of the history plus its value at 0,
the evolution descends to the quotient of the endpoint-augmented space, and
for C^1 right-hand sides each time-t map is differentiable there: its
derivative is the final window of the first-order response operator.  All
limit claims are certified along geometric schedules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certify import BoundPair, GapTable, RemainderTable
from .corpus import piecewise_constant
from .derivops import DerivativeContext, tangent_deviation, tangent_trajectory
from .funcrep import (
    DEFAULT_QUADRATURE,
    LazyComposition,
    QuadratureConfig,
    lp_norm,
    stack,
    sup_norm,
)
from .histspace import (
    HistoryConfig,
    HistoryElement,
    history_segment,
    prolongation_constant,
    regulation_constant,
    seminorm,
    static_prolongation,
)
from .nonlinear import Nonlinearity, spectral_norm
from .solver import Problem, solve

__all__ = [
    "ModulusTable",
    "Semiflow",
    "SemiflowReport",
    "continuity_modulus",
    "evolve",
    "quotient_invariance",
    "semigroup_defect",
    "time_map_derivative_gap",
    "time_map_remainder",
    "verify_semiflow",
]


@dataclass(frozen=True, eq=False)
class Semiflow:
    """The evolution family of one delay equation on one history space."""

    cfg: HistoryConfig
    nl: Nonlinearity
    r: float

    def __post_init__(self):
        if not 0.0 < self.r <= self.cfg.R + 1e-12 * max(1.0, self.cfg.R):
            raise ValueError("delay must satisfy 0 < r <= R")
        if self.nl.dim != self.cfg.N:
            raise ValueError("nonlinearity dimension does not match the space")

    def problem(self, phi: HistoryElement) -> Problem:
        return Problem(self.cfg, self.nl, self.r, phi)

    def escape_time(self, phi: HistoryElement) -> float:
        """Certified growth keeps the stepwise integrals finite forever."""
        return math.inf


def evolve(
    sf: Semiflow,
    t: float,
    phi: HistoryElement,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> HistoryElement:
    """The history window after running the equation for time t."""
    if t < 0:
        raise ValueError("evolution time must be nonnegative")
    if t == 0.0:
        return phi
    return solve(sf.problem(phi), float(t), quad).history_at(t)


def semigroup_defect(
    sf: Semiflow,
    t: float,
    s: float,
    phi: HistoryElement,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Seminorm gap between evolving by t + s and evolving in two stages."""
    direct = evolve(sf, t + s, phi, quad)
    staged = evolve(sf, s, evolve(sf, t, phi, quad), quad)
    return seminorm(direct - staged, sf.cfg, quad)


def quotient_invariance(
    sf: Semiflow,
    t: float,
    phi: HistoryElement,
    psi: HistoryElement,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Evolution gap between two representatives of the same class.

    The inputs must agree almost everywhere and at 0; the returned gap is
    what makes the induced map on classes well defined.
    """
    if seminorm(phi - psi, sf.cfg, quad) > 1e-9:
        raise ValueError("histories are not representatives of the same class")
    moved_phi = evolve(sf, t, phi, quad)
    moved_psi = evolve(sf, t, psi, quad)
    return seminorm(moved_phi - moved_psi, sf.cfg, quad)


@dataclass(frozen=True, eq=False)
class ModulusTable:
    """Continuity data of one time-t map along a history schedule.

    gaps pairs the history seminorm gaps with the evolved seminorm gaps;
    bounds holds the two-term proof bound per row: the regulated sup gap of
    the integrated parts plus the prolongation-inflated history gap.
    """

    time: float
    gaps: GapTable
    bounds: np.ndarray

    @property
    def within_bounds(self) -> bool:
        return bool(np.all(self.gaps.output_gaps <= self.bounds + 1e-8))


def continuity_modulus(
    sf: Semiflow,
    times,
    phi: HistoryElement,
    direction: HistoryElement,
    count: int,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> tuple:
    """Evolution gaps along phi + direction/2^k for each grid time."""
    if count < 3:
        raise ValueError("need at least three halvings")
    if seminorm(direction, sf.cfg, quad) < 1e-13:
        raise ValueError("direction must be nonzero")
    tables = []
    for t in times:
        if t < 0:
            raise ValueError("grid times must be nonnegative")
        ins, outs, bounds = [], [], []
        if t == 0.0:
            for k in range(count + 1):
                gap = seminorm(direction.scale(2.0**-k), sf.cfg, quad)
                ins.append(gap)
                outs.append(gap)
                bounds.append(gap)
        else:
            base_x = solve(sf.problem(phi), float(t), quad).x
            base_seg = history_segment(base_x, t, sf.cfg.R)
            window = regulation_constant(-sf.cfg.R, 0.0, sf.cfg.p)
            inflate = prolongation_constant(float(t), sf.cfg.p)
            for k in range(count + 1):
                step = direction.scale(2.0**-k)
                moved = phi + step
                xk = solve(sf.problem(moved), float(t), quad).x
                gap_in = seminorm(step, sf.cfg, quad)
                seg = history_segment(xk, t, sf.cfg.R)
                outs.append(seminorm(seg - base_seg, sf.cfg, quad))
                ydiff = (xk - base_x) - static_prolongation(step, float(t))
                bounds.append(window * sup_norm(ydiff, quad) + inflate * gap_in)
                ins.append(gap_in)
        tables.append(ModulusTable(float(t), GapTable(np.array(ins), np.array(outs)), np.array(bounds)))
    return tuple(tables)


def time_map_remainder(
    sf: Semiflow,
    t: float,
    phi: HistoryElement,
    chi0: HistoryElement,
    count: int,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> RemainderTable:
    """Linearization remainders of the time-t map in the evolved seminorm.

    Sizes are measured in the endpoint-augmented seminorm on both sides,
    which is the norm the induced quotient map is differentiable in.
    """
    if count < 3:
        raise ValueError("need at least three halvings")
    ctx = DerivativeContext(sf.problem(phi), float(t), sf.cfg.p)
    base = solve(ctx.problem, float(t), quad).x
    tangent0 = tangent_trajectory(ctx, chi0, quad)
    scales, remainders = [], []
    for k in range(count + 1):
        factor = 2.0**-k
        chi = chi0.scale(factor)
        moved = solve(sf.problem(phi + chi), float(t), quad).x
        rem_fn = moved - base - tangent0.scale(factor)
        scales.append(seminorm(chi, sf.cfg, quad))
        remainders.append(seminorm(history_segment(rem_fn, t, sf.cfg.R), sf.cfg, quad))
    return RemainderTable(np.array(scales), np.array(remainders))


def time_map_derivative_gap(
    sf: Semiflow,
    t: float,
    phi: HistoryElement,
    phi0: HistoryElement,
    probes: int = 12,
    seed: int = 0,
    extra=(),
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> BoundPair:
    """Gap between time-t map derivatives at two base histories.

    The analytic bound regulates the integral-part operator gap into the
    window seminorm: (R+1)^(1/p) times the L^q size of the Jacobian gap.
    The prolongation parts of the two derivatives cancel exactly.
    """
    ctx = DerivativeContext(sf.problem(phi), float(t), sf.cfg.p)
    ctx0 = DerivativeContext(sf.problem(phi0), float(t), sf.cfg.p)
    n = sf.cfg.N
    jac = sf.nl.jac
    paired = stack((phi.rep, phi0.rep))

    def jac_gap(values):
        return spectral_norm(jac(values[:, :n]) - jac(values[:, n:]))[:, None]

    holder_gap = lp_norm(LazyComposition(paired, jac_gap, 1), ctx.q, quad)
    bound = regulation_constant(-sf.cfg.R, 0.0, sf.cfg.p) * holder_gap

    rng = np.random.default_rng(seed)
    candidates = list(extra)
    for _ in range(int(probes)):
        candidates.append(
            HistoryElement(
                piecewise_constant(rng, (-sf.cfg.R, 0.0), n_pieces=8, n_components=n)
            )
        )
    probed = 0.0
    for chi in candidates:
        size = seminorm(chi, sf.cfg, quad)
        if size < 1e-13:
            continue
        gap_fn = tangent_deviation(ctx, chi, quad) - tangent_deviation(ctx0, chi, quad)
        out = seminorm(history_segment(gap_fn, t, sf.cfg.R), sf.cfg, quad)
        probed = max(probed, out / size)
    return BoundPair(probed, bound)


@dataclass(frozen=True, eq=False)
class SemiflowReport:
    """Bundle of the axiom, continuity, and smoothness evidence for one flow."""

    identity_defect: float
    composition_defects: np.ndarray
    stage_pairs: tuple
    modulus: tuple
    remainder: RemainderTable | None

    def __post_init__(self):
        if self.identity_defect < 0 or np.any(np.asarray(self.composition_defects) < 0):
            raise ValueError("defects must be nonnegative")
        if len(self.stage_pairs) != len(self.composition_defects):
            raise ValueError("one stage pair per composition defect required")

    @property
    def worst_composition_defect(self) -> float:
        return float(np.max(self.composition_defects))


def verify_semiflow(
    sf: Semiflow,
    phi: HistoryElement,
    direction: HistoryElement,
    count: int = 12,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> SemiflowReport:
    """Run the standard evidence battery for one problem.

    Axiom defects over a stage grid including boundary-crossing sums, the
    continuity modulus at half and full delay, and (when the right-hand
    side supports it) the time-map linearization remainders.
    """
    identity = seminorm(evolve(sf, 0.0, phi, quad) - phi, sf.cfg, quad)
    stages = [0.0, 0.3 * sf.r, 0.5 * sf.r, sf.r]
    pairs, defects = [], []
    for t in stages:
        for s in stages:
            pairs.append((t, s))
            defects.append(semigroup_defect(sf, t, s, phi, quad))
    modulus = continuity_modulus(sf, [0.5 * sf.r, sf.r], phi, direction, count, quad)
    remainder = None
    differentiable = sf.nl.jac is not None and sf.nl.df_growth is not None
    if differentiable and sf.cfg.p >= sf.nl.df_growth.alpha + 1 - 1e-12:
        remainder = time_map_remainder(sf, sf.r, phi, direction, count, quad)
    return SemiflowReport(identity, np.array(defects), tuple(pairs), modulus, remainder)
