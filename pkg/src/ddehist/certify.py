"""Finite certificates for decay and bound claims along geometric schedules.

A limit statement like "the remainder is o(norm of the perturbation)" cannot
be decided by finitely many evaluations.  The strongest finitely checkable
surrogate, used throughout this package, fixes a geometric schedule of
perturbation sizes and requires the measured sequence to become monotone
non-increasing and to end far below where it started.  Values that reach the
noise floor of the arithmetic are treated as converged rather than compared.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NOISE_FLOOR",
    "BoundPair",
    "Certificate",
    "GapTable",
    "RemainderTable",
    "certify_decay",
    "halving",
]

NOISE_FLOOR = 1e-12


def halving(count: int) -> np.ndarray:
    """Scale factors 1, 1/2, ..., 2^-count for geometric schedules."""
    if count < 3:
        raise ValueError("schedules need at least three halvings to say anything")
    return 0.5 ** np.arange(count + 1)


@dataclass(frozen=True, eq=False)
class Certificate:
    """Outcome of a decay check on one measured sequence."""

    passed: bool
    reason: str
    values: np.ndarray
    tail_start: int

    @property
    def final_over_initial(self) -> float:
        v = self.values
        return float(v[-1] / v[0]) if v[0] > 0 else 0.0


def certify_decay(
    values,
    final_fraction: float = 1e-3,
    floor: float = NOISE_FLOOR,
    slack: float = 1.05,
) -> Certificate:
    """Check that a sequence decays: eventually non-increasing, small at the end.

    The tail may start anywhere in the first half of the sequence; entries at
    or below the floor count as equal.  The final entry must not exceed
    final_fraction times the initial one (up to the floor).
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 4:
        raise ValueError("need a one dimensional sequence with at least four entries")
    if np.any(~np.isfinite(v)) or np.any(v < 0):
        raise ValueError("sequence entries must be finite and nonnegative")
    if np.all(v <= floor):
        return Certificate(True, "all values at the noise floor", v, 0)
    clipped = np.maximum(v, floor)
    tail_start = -1
    for k0 in range(v.size // 2 + 1):
        tail = clipped[k0:]
        if np.all(tail[1:] <= slack * tail[:-1]):
            tail_start = k0
            break
    monotone = tail_start >= 0
    small_final = v[-1] <= final_fraction * v[0] + floor
    if monotone and small_final:
        reason = f"non-increasing from row {tail_start}, final/initial = {v[-1] / v[0]:.3e}"
    elif not monotone:
        reason = "no non-increasing tail starting in the first half"
    else:
        reason = f"final/initial = {v[-1] / v[0]:.3e} exceeds {final_fraction:.0e}"
    return Certificate(monotone and small_final, reason, v, tail_start)


@dataclass(frozen=True, eq=False)
class BoundPair:
    """An empirical lower bound paired with an analytic upper bound.

    Operator norms on function spaces cannot be computed exactly, so the
    claim being certified is one-sided: every probed value must sit below
    the analytic bound, up to a fixed comparison tolerance.
    """

    probed: float
    bound: float
    tolerance: float = 1e-8

    @property
    def slack(self) -> float:
        return self.bound + self.tolerance - self.probed

    @property
    def passed(self) -> bool:
        return self.slack >= 0.0


def _decreasing_positive(scales: np.ndarray) -> None:
    if scales.ndim != 1 or scales.size < 2:
        raise ValueError("need at least two schedule rows")
    if np.any(scales <= 0) or np.any(np.diff(scales) >= 0):
        raise ValueError("schedule scales must be positive and strictly decreasing")


@dataclass(frozen=True, eq=False)
class RemainderTable:
    """Rows (perturbation size, remainder size) ordered by decreasing size."""

    scales: np.ndarray
    remainders: np.ndarray

    def __post_init__(self):
        scales = np.asarray(self.scales, dtype=float)
        rems = np.asarray(self.remainders, dtype=float)
        _decreasing_positive(scales)
        if rems.shape != scales.shape:
            raise ValueError("one remainder per scale required")
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "remainders", rems)

    @property
    def ratios(self) -> np.ndarray:
        return self.remainders / self.scales

    def certificate(self, final_fraction: float = 1e-3, floor: float = NOISE_FLOOR) -> Certificate:
        """The small-o check: remainder-to-size ratios must decay."""
        return certify_decay(self.ratios, final_fraction=final_fraction, floor=floor)

    def as_rows(self):
        return [
            (float(s), float(r), float(r / s))
            for s, r in zip(self.scales, self.remainders)
        ]


@dataclass(frozen=True, eq=False)
class GapTable:
    """Rows (input gap, output gap) for continuity probes along a schedule."""

    input_gaps: np.ndarray
    output_gaps: np.ndarray

    def __post_init__(self):
        ins = np.asarray(self.input_gaps, dtype=float)
        outs = np.asarray(self.output_gaps, dtype=float)
        _decreasing_positive(ins)
        if outs.shape != ins.shape:
            raise ValueError("one output gap per input gap required")
        object.__setattr__(self, "input_gaps", ins)
        object.__setattr__(self, "output_gaps", outs)

    def certificate(self, final_fraction: float = 1e-3, floor: float = NOISE_FLOOR) -> Certificate:
        """The continuity check: output gaps must decay with the input gaps."""
        return certify_decay(self.output_gaps, final_fraction=final_fraction, floor=floor)

    def as_rows(self):
        return [(float(i), float(o)) for i, o in zip(self.input_gaps, self.output_gaps)]
