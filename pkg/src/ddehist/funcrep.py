"""Piecewise-polynomial function representatives with a distinguished endpoint.

A function on a closed interval [a, b] is stored as one polynomial per
component on each sub-interval of a breakpoint partition, in a Chebyshev basis
on the piece mapped to [-1, 1].  Pieces are half open [t_i, t_{i+1}):
evaluation at an interior breakpoint uses the piece to its right, and
evaluation at b returns a separately stored endpoint value which may differ
from the polynomial limit.  The stored endpoint is what makes these objects
suitable representatives for seminormed history spaces: integral norms are
computed by quadrature at nodes that are strictly interior to pieces, so two
representatives that agree almost everywhere and share the endpoint value are
indistinguishable to every norm in this module.

All instances are immutable and every operation returns a new value.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np
from numpy.polynomial import chebyshev as _cheb

__all__ = [
    "DomainError",
    "QuadratureConfig",
    "DEFAULT_QUADRATURE",
    "PiecewiseFunction",
    "LazyComposition",
    "evaluate",
    "lp_norm",
    "sup_norm",
    "materialize",
    "stack",
]


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a function."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings shared by every integral and supremum computed here.

    nodes_per_piece: Gauss-Legendre node count used on each piece for
        integral norms, and the Chebyshev node count used when interpolating
        compositions.  A rule with n nodes integrates polynomials of degree
        2n - 1 exactly.
    sup_samples_per_piece: starting sample count per piece for supremum
        estimates; the grid is doubled until two successive levels agree.
    tolerance: agreement threshold for the supremum grid doubling.
    """

    nodes_per_piece: int = 16
    sup_samples_per_piece: int = 64
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.nodes_per_piece < 2:
            raise ValueError("nodes_per_piece must be at least 2")
        if self.sup_samples_per_piece < 8:
            raise ValueError("sup_samples_per_piece must be at least 8")
        if not self.tolerance >= 0.0:
            raise ValueError("tolerance must be nonnegative")


DEFAULT_QUADRATURE = QuadratureConfig()

# Grid-doubling levels for sup_norm before giving up on agreement.
_SUP_MAX_LEVELS = 7


def _scale_tol(a: float, b: float) -> float:
    return 1e-12 * max(1.0, abs(a), abs(b))


@lru_cache(maxsize=None)
def _gauss_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=None)
def _cheb_nodes(n: int):
    # Chebyshev points of the first kind, ascending, strictly inside (-1, 1).
    k = np.arange(n)
    x = -np.cos((2 * k + 1) * np.pi / (2 * n))
    x.flags.writeable = False
    return x


@lru_cache(maxsize=None)
def _cheb_interp_matrix(n: int):
    # Maps values at the n first-kind points to Chebyshev coefficients.
    # Exact (up to rounding) for polynomials of degree < n.
    x = _cheb_nodes(n)
    theta = np.arccos(x)
    j = np.arange(n)
    mat = (2.0 / n) * np.cos(np.outer(j, theta))
    mat[0] *= 0.5
    mat.flags.writeable = False
    return mat


@lru_cache(maxsize=None)
def _extrema_grid(n: int):
    # Chebyshev extrema including both endpoints, ascending.
    k = np.arange(n)
    x = -np.cos(k * np.pi / (n - 1))
    x[0], x[-1] = -1.0, 1.0
    x.flags.writeable = False
    return x


def _as_matrix(values, n_components: int | None = None) -> np.ndarray:
    arr = np.array(values, dtype=float, ndmin=2)
    if arr.ndim != 2:
        raise ValueError("coefficient blocks must be two dimensional")
    if n_components is not None and arr.shape[1] != n_components:
        raise ValueError("component count mismatch in coefficients")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class PiecewiseFunction:
    """Vector-valued piecewise polynomial on [breakpoints[0], breakpoints[-1]].

    breakpoints: strictly increasing, at least two entries.
    coeffs: one (degree_i + 1, n_components) Chebyshev coefficient block per
        piece, in the local coordinate mapping the piece onto [-1, 1].
    endpoint_value: the value returned at the right domain endpoint.
    """

    breakpoints: np.ndarray
    coeffs: tuple
    endpoint_value: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError("need at least two breakpoints")
        if not np.all(np.diff(bp) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        blocks = tuple(_freeze(np.atleast_2d(c)) for c in self.coeffs)
        if len(blocks) != bp.size - 1:
            raise ValueError("piece count does not match breakpoints")
        n = blocks[0].shape[1]
        for c in blocks:
            if c.ndim != 2 or c.shape[1] != n:
                raise ValueError("all pieces must share a component count")
        ev = np.asarray(self.endpoint_value, dtype=float).reshape(-1)
        if ev.size != n:
            raise ValueError("endpoint value has wrong component count")
        object.__setattr__(self, "breakpoints", _freeze(bp))
        object.__setattr__(self, "coeffs", blocks)
        object.__setattr__(self, "endpoint_value", _freeze(ev))

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_power(cls, breakpoints, pieces, endpoint_value=None):
        """Build from per-piece power-basis coefficients in the global variable.

        pieces: one block per piece; block[j] lists the ascending power
        coefficients of component j as a polynomial in t (not in a local
        variable).  Ragged component degrees are allowed within a block.
        """
        bp = np.asarray(breakpoints, dtype=float)
        blocks = []
        for i, piece in enumerate(pieces):
            rows = [np.atleast_1d(np.asarray(row, dtype=float)) for row in piece]
            deg = max(r.size for r in rows) - 1
            power = np.zeros((deg + 1, len(rows)))
            for j, r in enumerate(rows):
                power[: r.size, j] = r
            c, d = bp[i], bp[i + 1]
            u = _cheb_nodes(deg + 1)
            t = 0.5 * (c + d) + 0.5 * (d - c) * u
            vals = np.polynomial.polynomial.polyval(t, power)  # (N, deg+1)
            blocks.append(_cheb_interp_matrix(deg + 1) @ vals.T)
        if endpoint_value is None:
            endpoint_value = _cheb.chebval(1.0, blocks[-1])
        return cls(bp, tuple(blocks), endpoint_value)

    @classmethod
    def constant(cls, values, domain):
        values = np.atleast_1d(np.asarray(values, dtype=float))
        a, b = float(domain[0]), float(domain[1])
        return cls(np.array([a, b]), (values[None, :],), values)

    @classmethod
    def zero(cls, n_components, domain):
        return cls.constant(np.zeros(n_components), domain)

    @classmethod
    def identity(cls, domain):
        return cls.from_power(list(domain), [[[0.0, 1.0]]])

    # -- basic queries -----------------------------------------------------

    @property
    def domain(self):
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def n_pieces(self) -> int:
        return len(self.coeffs)

    @property
    def n_components(self) -> int:
        return self.coeffs[0].shape[1]

    @property
    def degree(self) -> int:
        return max(c.shape[0] - 1 for c in self.coeffs)

    def piece_interval(self, i: int):
        return float(self.breakpoints[i]), float(self.breakpoints[i + 1])

    def _local(self, i: int, t: np.ndarray) -> np.ndarray:
        c, d = self.breakpoints[i], self.breakpoints[i + 1]
        return (2.0 * t - (c + d)) / (d - c)

    def piece_values(self, i: int, u: np.ndarray) -> np.ndarray:
        """Evaluate piece i at local coordinates u in [-1, 1]; returns (len(u), N)."""
        return _cheb.chebval(np.asarray(u, dtype=float), self.coeffs[i]).T

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t):
        t_in = np.asarray(t, dtype=float)
        scalar = t_in.ndim == 0
        tt = np.atleast_1d(t_in).astype(float)
        a, b = self.breakpoints[0], self.breakpoints[-1]
        tol = _scale_tol(a, b)
        if np.any(tt < a - tol) or np.any(tt > b + tol):
            raise DomainError(
                f"evaluation point outside domain [{a}, {b}]"
            )
        tt = np.clip(tt, a, b)
        out = np.empty((tt.size, self.n_components))
        idx = np.searchsorted(self.breakpoints, tt, side="right") - 1
        idx = np.clip(idx, 0, self.n_pieces - 1)
        at_end = tt == b
        for i in np.unique(idx):
            mask = (idx == i) & ~at_end
            if mask.any():
                out[mask] = self.piece_values(i, self._local(i, tt[mask]))
        if at_end.any():
            out[at_end] = self.endpoint_value
        return out[0] if scalar else out

    # -- structural operations ----------------------------------------------

    def shift(self, dt: float) -> "PiecewiseFunction":
        """Translate the domain by dt.  Piece polynomials are untouched, so
        every norm in this module is preserved exactly up to rounding."""
        return PiecewiseFunction(
            self.breakpoints + float(dt), self.coeffs, self.endpoint_value
        )

    def _reexpand(self, i: int, lo: float, hi: float, degree: int | None = None):
        # Coefficients of piece i re-expressed on [lo, hi] (a sub-interval).
        c, d = self.piece_interval(i)
        if lo == c and hi == d and degree is None:
            return self.coeffs[i]
        deg = self.coeffs[i].shape[0] - 1 if degree is None else degree
        u_new = _cheb_nodes(deg + 1)
        t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * u_new
        vals = self.piece_values(i, self._local(i, t))
        return _cheb_interp_matrix(deg + 1) @ vals

    def _pieces_on(self, partition: np.ndarray):
        mids = 0.5 * (partition[:-1] + partition[1:])
        idx = np.clip(
            np.searchsorted(self.breakpoints, mids, side="right") - 1,
            0,
            self.n_pieces - 1,
        )
        return tuple(
            self._reexpand(int(i), float(partition[k]), float(partition[k + 1]))
            for k, i in enumerate(idx)
        )

    def restrict(self, lo: float, hi: float) -> "PiecewiseFunction":
        """Restriction to [lo, hi] within the domain.

        The new endpoint value is the evaluation of self at hi, so a
        restriction ending at an interior breakpoint takes its distinguished
        value from the piece on the right, exactly like pointwise evaluation.
        """
        a, b = self.domain
        lo, hi = float(lo), float(hi)
        tol = _scale_tol(a, b)
        if lo < a - tol or hi > b + tol or not lo < hi:
            raise DomainError("restriction interval must sit inside the domain")
        lo, hi = max(lo, a), min(hi, b)
        inner = self.breakpoints[
            (self.breakpoints > lo + tol) & (self.breakpoints < hi - tol)
        ]
        partition = np.concatenate(([lo], inner, [hi]))
        return PiecewiseFunction(partition, self._pieces_on(partition), self(hi))

    def refine(self, points) -> "PiecewiseFunction":
        """Insert extra breakpoints; the represented function is unchanged."""
        a, b = self.domain
        tol = _scale_tol(a, b)
        pts = np.asarray(points, dtype=float)
        pts = pts[(pts > a + tol) & (pts < b - tol)]
        partition = _merge_partitions(self.breakpoints, pts, tol)
        return PiecewiseFunction(
            partition, self._pieces_on(partition), self.endpoint_value
        )

    def with_endpoint(self, values) -> "PiecewiseFunction":
        return PiecewiseFunction(self.breakpoints, self.coeffs, values)

    def _snap_domain(self, lo: float, hi: float) -> "PiecewiseFunction":
        # Replace the outermost breakpoints by exact targets (within rounding).
        a, b = self.domain
        tol = 1e-9 * max(1.0, abs(a), abs(b), abs(lo), abs(hi))
        if abs(a - lo) > tol or abs(b - hi) > tol:
            raise DomainError("snap targets too far from the actual domain")
        bp = np.array(self.breakpoints)
        bp[0], bp[-1] = lo, hi
        return PiecewiseFunction(bp, self.coeffs, self.endpoint_value)

    # -- algebra --------------------------------------------------------------

    def _binary(self, other: "PiecewiseFunction", sign: float):
        if self.n_components != other.n_components:
            raise ValueError("component counts differ")
        a, b = self.domain
        oa, ob = other.domain
        tol = _scale_tol(min(a, oa), max(b, ob))
        if abs(a - oa) > tol or abs(b - ob) > tol:
            raise DomainError("domains differ")
        partition = _merge_partitions(self.breakpoints, other.breakpoints, tol)
        partition[0], partition[-1] = a, b
        mine = self._pieces_on(partition)
        theirs = other._pieces_on(partition)
        blocks = tuple(_add_blocks(x, y, sign) for x, y in zip(mine, theirs))
        endpoint = self.endpoint_value + sign * other.endpoint_value
        return PiecewiseFunction(partition, blocks, endpoint)

    def __add__(self, other):
        return self._binary(other, 1.0)

    def __sub__(self, other):
        return self._binary(other, -1.0)

    def scale(self, factor: float) -> "PiecewiseFunction":
        factor = float(factor)
        return PiecewiseFunction(
            self.breakpoints,
            tuple(factor * c for c in self.coeffs),
            factor * self.endpoint_value,
        )

    def __neg__(self):
        return self.scale(-1.0)

    def __mul__(self, factor):
        return self.scale(factor)

    __rmul__ = __mul__

    def __repr__(self):
        a, b = self.domain
        return (
            f"PiecewiseFunction([{a:g}, {b:g}], pieces={self.n_pieces}, "
            f"components={self.n_components}, degree={self.degree})"
        )


def _add_blocks(x: np.ndarray, y: np.ndarray, sign: float) -> np.ndarray:
    rows = max(x.shape[0], y.shape[0])
    out = np.zeros((rows, x.shape[1]))
    out[: x.shape[0]] = x
    out[: y.shape[0]] += sign * y
    return out


def _merge_partitions(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    pts = np.sort(np.concatenate((np.asarray(a, float), np.asarray(b, float))))
    keep = [pts[0]]
    for t in pts[1:]:
        if t - keep[-1] > tol:
            keep.append(t)
    return np.array(keep)


@dataclass(frozen=True, eq=False)
class LazyComposition:
    """A pointwise map applied to a piecewise function, never materialized.

    fn maps a (k, base.n_components) batch of values to a (k, n_out) batch.
    Evaluation and quadrature sample the base strictly inside its pieces and
    push the samples through fn, so the composition inherits the base's
    almost-everywhere semantics; the endpoint value is fn(base endpoint).
    """

    base: PiecewiseFunction
    fn: Callable[[np.ndarray], np.ndarray]
    n_out: int

    @property
    def breakpoints(self) -> np.ndarray:
        return self.base.breakpoints

    @property
    def domain(self):
        return self.base.domain

    @property
    def n_pieces(self) -> int:
        return self.base.n_pieces

    @property
    def n_components(self) -> int:
        return self.n_out

    @property
    def endpoint_value(self) -> np.ndarray:
        return self.fn(self.base.endpoint_value[None, :])[0]

    def piece_interval(self, i: int):
        return self.base.piece_interval(i)

    def piece_values(self, i: int, u: np.ndarray) -> np.ndarray:
        return self.fn(self.base.piece_values(i, u))

    def __call__(self, t):
        t_in = np.asarray(t, dtype=float)
        if t_in.ndim == 0:
            return self.fn(np.atleast_2d(self.base(t_in)))[0]
        return self.fn(self.base(t_in))


Representable = Union[PiecewiseFunction, LazyComposition]


def evaluate(f: Representable, t):
    """Pointwise evaluation; arrays of points are evaluated in one call."""
    return f(t)


def lp_norm(f: Representable, p: float, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """The L^p norm of |f| (Euclidean norm across components) over the domain.

    Composite Gauss-Legendre with quad.nodes_per_piece nodes per piece,
    applied directly to compositions without materializing them.  Nodes are
    strictly interior, so neither stored endpoint values nor breakpoint
    conventions influence the result.
    """
    p = float(p)
    if not p >= 1.0:
        raise ValueError("p must be at least 1")
    u, w = _gauss_rule(quad.nodes_per_piece)
    total = 0.0
    for i in range(f.n_pieces):
        c, d = f.piece_interval(i)
        radii = np.linalg.norm(f.piece_values(i, u), axis=-1)
        total += 0.5 * (d - c) * float(w @ radii**p)
    return total ** (1.0 / p)


def _parabolic_vertex(u: np.ndarray, r: np.ndarray, k: int) -> float | None:
    # Vertex of the parabola through three consecutive samples around k.
    du1 = u[k] - u[k - 1]
    du2 = u[k] - u[k + 1]
    dr1 = r[k] - r[k - 1]
    dr2 = r[k] - r[k + 1]
    denom = du1 * dr2 - du2 * dr1
    if abs(denom) < 1e-300:
        return None
    shift = 0.5 * (du1 * du1 * dr2 - du2 * du2 * dr1) / denom
    if not np.isfinite(shift):
        return None
    return float(np.clip(u[k] - shift, -1.0, 1.0))


def sup_norm(f: Representable, quad: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Supremum of |f| by Chebyshev sampling with refinement.

    Meaningful for continuous representatives (the caller asserts
    continuity).  Each piece is sampled on a closed Chebyshev extrema grid,
    the discrete maximum is polished by one parabolic vertex step, and the
    grid is doubled until two successive levels agree within quad.tolerance.
    The stored endpoint value always participates.  The result can
    under-estimate the true supremum by no more than the final grid
    agreement error.
    """
    samples = quad.sup_samples_per_piece
    previous = None
    for _ in range(_SUP_MAX_LEVELS):
        grid = _extrema_grid(samples)
        best = float(np.linalg.norm(np.atleast_1d(f.endpoint_value)))
        for i in range(f.n_pieces):
            radii = np.linalg.norm(f.piece_values(i, grid), axis=-1)
            best = max(best, float(radii.max()))
            k = int(np.argmax(radii))
            if 0 < k < radii.size - 1:
                vertex = _parabolic_vertex(grid, radii, k)
                if vertex is not None:
                    polished = np.linalg.norm(
                        f.piece_values(i, np.array([vertex])), axis=-1
                    )
                    best = max(best, float(polished[0]))
        if previous is not None and abs(best - previous) <= quad.tolerance:
            return max(best, previous)
        previous = best
        samples = 2 * samples
    return previous


def materialize(
    f: LazyComposition,
    degree: int,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
):
    """Interpolate a composition piecewise at the given degree.

    Returns (function, defect) where defect is the largest sampled deviation
    between the interpolant and the composition on a dense per-piece grid.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    nodes = _cheb_nodes(degree + 1)
    fit = _cheb_interp_matrix(degree + 1)
    blocks = []
    defect = 0.0
    check = _extrema_grid(max(quad.sup_samples_per_piece, 2 * degree + 4))
    for i in range(f.n_pieces):
        coeffs = fit @ f.piece_values(i, nodes)
        blocks.append(coeffs)
        approx = _cheb.chebval(check, coeffs).T
        exact = f.piece_values(i, check)
        defect = max(defect, float(np.abs(approx - exact).max()))
    out = PiecewiseFunction(f.breakpoints, tuple(blocks), f.endpoint_value)
    return out, defect


def stack(functions: Sequence[PiecewiseFunction]) -> PiecewiseFunction:
    """Concatenate components of several functions on a merged partition."""
    if not functions:
        raise ValueError("need at least one function")
    a, b = functions[0].domain
    tol = _scale_tol(a, b)
    for g in functions[1:]:
        ga, gb = g.domain
        if abs(ga - a) > tol or abs(gb - b) > tol:
            raise DomainError("stack requires a common domain")
    partition = functions[0].breakpoints
    for g in functions[1:]:
        partition = _merge_partitions(partition, g.breakpoints, tol)
    partition[0], partition[-1] = a, b
    per_fn = [g._pieces_on(partition) for g in functions]
    blocks = []
    for k in range(partition.size - 1):
        rows = max(p[k].shape[0] for p in per_fn)
        cols = sum(p[k].shape[1] for p in per_fn)
        block = np.zeros((rows, cols))
        at = 0
        for p in per_fn:
            block[: p[k].shape[0], at : at + p[k].shape[1]] = p[k]
            at += p[k].shape[1]
        blocks.append(block)
    endpoint = np.concatenate([g.endpoint_value for g in functions])
    return PiecewiseFunction(partition, tuple(blocks), endpoint)
