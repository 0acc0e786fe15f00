"""Experiment driver: JSON configs in, CSV tables and claim summaries out.

A config holds a list of experiments.  Each experiment names a kind, builds
a problem from registry nonlinearities and piecewise history specs, runs
the matching certificate suite, and emits one CSV per table plus one
summary line per claim.  Identical config and seed give byte-identical
CSV files: floats are printed with 17 significant digits and LF endings,
and all randomness flows through per-experiment seeds.

Exit codes: 0 when every claim passes, 1 when a claim fails, 2 for
config errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .certify import certify_decay
from .composition import (
    CompositionContext,
    MeasureDomain,
    apply_derivative,
    compose,
    continuity_probe,
    smoothness_probe,
)
from .corpus import bump_history, indicator_history, null_set_variant, random_history, random_piecewise
from .derivops import (
    DerivativeContext,
    curvature_remainder_bound,
    estimate_operator_norm,
    remainder_schedule,
    tangent_deviation,
    tangent_deviation_bound,
)
from .funcrep import (
    DEFAULT_QUADRATURE,
    LazyComposition,
    PiecewiseFunction,
    QuadratureConfig,
    lp_norm,
    stack,
    sup_norm,
)
from .histspace import HistoryConfig, HistoryElement, endpoint_lp_norm, seminorm
from .nonlinear import cubic, make
from .semiflow import Semiflow, quotient_invariance, verify_semiflow
from .solver import Problem, solve

KINDS = (
    "solve",
    "dependence",
    "lipschitz",
    "smooth",
    "composition",
    "semiflow",
    "discontinuity",
)

OUT_ENV_VAR = "DDEHIST_OUT"

_NAME_RE = re.compile(r"^[A-Za-z0-9._-]+$")


class ConfigError(ValueError):
    """Raised for unusable configs; mapped to exit code 2."""


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


@dataclass(frozen=True)
class Claim:
    """One verdict line: a measured quantity against its certified limit."""

    experiment: str
    name: str
    measured: float
    limit: float
    passed: bool
    relation: str = "<="

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (
            f"{tag} {self.experiment} {self.name} "
            f"measured={self.measured:.6g} {self.relation} limit={self.limit:.6g}"
        )


@dataclass(frozen=True)
class ExperimentResult:
    name: str
    tables: list
    claims: list


@dataclass(frozen=True)
class ExperimentSpec:
    """One parsed experiment with everything materialized up front."""

    name: str
    kind: str
    seed: int
    nl: object
    cfg: HistoryConfig = None
    delay: float = None
    horizon: float = None
    history: HistoryElement = None
    direction: HistoryElement = None
    count: int = 12
    grid: int = 1001
    probes: int = 12
    instances: int = 20
    scale: float = 1.0
    adversarial: bool = True
    q: float = 2.0
    domain: MeasureDomain = None
    base_fn: PiecewiseFunction = None
    direction_fn: PiecewiseFunction = None
    smoothness: bool = True
    quad: QuadratureConfig = DEFAULT_QUADRATURE


# -- config parsing ---------------------------------------------------------


def _space(doc) -> HistoryConfig:
    _require(isinstance(doc, dict), "space must be an object with R, p, N")
    try:
        return HistoryConfig(
            R=float(doc["R"]), p=float(doc["p"]), N=int(doc.get("N", 1))
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad space: {exc}") from exc


def _nonlinearity(doc):
    _require(isinstance(doc, dict) and "name" in doc, "nonlinearity needs a name")
    params = doc.get("params", {})
    _require(isinstance(params, dict), "nonlinearity params must be an object")
    try:
        return make(doc["name"], **params)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad nonlinearity: {exc}") from exc


def _function(spec, domain, n_components, rng, label) -> PiecewiseFunction:
    """A piecewise function on `domain` from a constant/pieces/random spec."""
    _require(isinstance(spec, dict), f"{label} must be an object")
    lo, hi = float(domain[0]), float(domain[1])
    if "constant" in spec:
        values = np.atleast_1d(np.asarray(spec["constant"], dtype=float))
        _require(values.size == n_components, f"{label} constant has wrong length")
        out = PiecewiseFunction.constant(values, (lo, hi))
    elif "breakpoints" in spec:
        try:
            out = PiecewiseFunction.from_power(
                spec["breakpoints"], spec["pieces"], spec.get("endpoint")
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ConfigError(f"bad {label} pieces: {exc}") from exc
        a, b = out.domain
        tol = 1e-9 * max(1.0, abs(lo), abs(hi))
        _require(
            abs(a - lo) <= tol and abs(b - hi) <= tol,
            f"{label} breakpoints must span [{lo}, {hi}]",
        )
        _require(out.n_components == n_components, f"{label} has wrong component count")
    elif "random" in spec:
        opts = spec["random"] if isinstance(spec["random"], dict) else {}
        out = random_piecewise(
            rng,
            (lo, hi),
            n_pieces=int(opts.get("pieces", 3)),
            max_degree=int(opts.get("degree", 3)),
            n_components=n_components,
            scale=float(opts.get("scale", 1.0)),
            continuous=bool(opts.get("continuous", False)),
        )
    else:
        raise ConfigError(f"{label} needs 'constant', 'breakpoints', or 'random'")
    if "endpoint" in spec and "breakpoints" not in spec:
        out = out.with_endpoint(np.asarray(spec["endpoint"], dtype=float))
    return out


def _history(spec, cfg, rng, label) -> HistoryElement:
    return HistoryElement(_function(spec, (-cfg.R, 0.0), cfg.N, rng, label))


def _int_field(doc, key, default, lo, hi):
    try:
        value = int(doc.get(key, default))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be an integer") from exc
    _require(lo <= value <= hi, f"{key} must lie in [{lo}, {hi}]")
    return value


def _float_field(doc, key, default=None):
    raw = doc.get(key, default)
    _require(raw is not None, f"missing required field {key}")
    try:
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be a number") from exc


def _quadrature(doc) -> QuadratureConfig:
    if "quadrature" not in doc:
        return DEFAULT_QUADRATURE
    opts = doc["quadrature"]
    _require(isinstance(opts, dict), "quadrature must be an object")
    try:
        return QuadratureConfig(
            nodes_per_piece=int(opts.get("nodes_per_piece", 16)),
            sup_samples_per_piece=int(opts.get("sup_samples_per_piece", 64)),
            tolerance=float(opts.get("tolerance", 1e-10)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad quadrature: {exc}") from exc


def parse_experiment(doc, index, global_seed) -> ExperimentSpec:
    _require(isinstance(doc, dict), "each experiment must be an object")
    kind = doc.get("kind")
    _require(kind in KINDS, f"unknown experiment kind {kind!r}; choices: {KINDS}")
    name = str(doc.get("name", f"exp{index + 1:02d}"))
    _require(_NAME_RE.match(name), f"experiment name {name!r} is not filename-safe")
    seed = _int_field(doc, "seed", global_seed + index, 0, 2**64 - 1)
    rng = np.random.default_rng(seed)
    quad = _quadrature(doc)
    nl = _nonlinearity(doc.get("nonlinearity", {"name": "missing"}))

    if kind == "composition":
        dom = doc.get("domain", {"lower": 0.0, "upper": 1.0})
        try:
            domain = MeasureDomain(float(dom["lower"]), float(dom["upper"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad domain: {exc}") from exc
        q = _float_field(doc, "q", 2.0)
        span = (domain.lower, domain.upper)
        base_fn = _function(doc.get("base", {"constant": [0.0] * nl.dim}), span, nl.dim, rng, "base")
        direction_fn = _function(
            doc.get("direction", {"constant": [1.0] * nl.dim}), span, nl.dim, rng, "direction"
        )
        smoothness = bool(doc.get("smoothness", True))
        count = _int_field(doc, "count", 12, 3, 40)
        spec = ExperimentSpec(
            name=name, kind=kind, seed=seed, nl=nl, q=q, domain=domain,
            base_fn=base_fn, direction_fn=direction_fn, smoothness=smoothness,
            count=count, probes=_int_field(doc, "probes", 12, 1, 64), quad=quad,
        )
        _validate_composition(spec)
        return spec

    cfg = _space(doc.get("space", {}))
    delay = _float_field(doc, "delay", cfg.R)
    history = _history(doc.get("history", {"constant": [1.0] * cfg.N}), cfg, rng, "history")

    if kind == "discontinuity":
        count = _int_field(doc, "count", max(12, math.ceil(5.0 * cfg.p)), 3, 20)
        spec = ExperimentSpec(
            name=name, kind=kind, seed=seed, nl=nl, cfg=cfg, delay=delay,
            count=count, quad=quad,
        )
        _validate_discontinuity(spec)
        return spec

    direction = _history(
        doc.get("direction", {"constant": [1.0] * cfg.N}), cfg, rng, "direction"
    )
    horizon = _float_field(doc, "horizon", delay if kind != "solve" else None)
    spec = ExperimentSpec(
        name=name, kind=kind, seed=seed, nl=nl, cfg=cfg, delay=delay,
        horizon=horizon, history=history, direction=direction,
        count=_int_field(doc, "count", 12, 3, 40),
        grid=_int_field(doc, "grid", 1001, 2, 10**6),
        probes=_int_field(doc, "probes", 12, 1, 64),
        instances=_int_field(doc, "instances", 20, 1, 10**4),
        scale=_float_field(doc, "scale", 1.0),
        adversarial=bool(doc.get("adversarial", True)),
        quad=quad,
    )
    _VALIDATORS[kind](spec)
    return spec


def _validate_problem(spec):
    try:
        return Problem(spec.cfg, spec.nl, spec.delay, spec.history)
    except ValueError as exc:
        raise ConfigError(f"{spec.name}: {exc}") from exc


def _validate_solve(spec):
    _validate_problem(spec)
    _require(spec.horizon > 0, f"{spec.name}: horizon must be positive")


def _validate_dependence(spec):
    _validate_problem(spec)
    _require(
        0 < spec.horizon <= spec.delay + 1e-12,
        f"{spec.name}: dependence probes need horizon <= delay",
    )
    _require(
        seminorm(spec.direction, spec.cfg) > 1e-13,
        f"{spec.name}: direction must be nonzero",
    )


def _validate_lipschitz(spec):
    _require(
        spec.cfg.p == 1.0,
        f"{spec.name}: the dependence constant is stated for p = 1",
    )
    growth = spec.nl.df_growth
    _require(
        growth is not None and growth.c1 == 0.0,
        f"{spec.name}: needs a globally Lipschitz map (constant Jacobian bound)",
    )
    _require(
        0 < spec.horizon < spec.cfg.R,
        f"{spec.name}: horizon must satisfy 0 < T < R",
    )
    _require(
        spec.horizon <= spec.delay <= spec.cfg.R + 1e-12,
        f"{spec.name}: delay must lie in [horizon, R]",
    )
    _validate_problem(spec)


def _validate_smooth(spec):
    pb = _validate_problem(spec)
    try:
        DerivativeContext(pb, spec.horizon, spec.cfg.p)
    except ValueError as exc:
        raise ConfigError(f"{spec.name}: {exc}") from exc
    _require(
        lp_norm(spec.direction.rep, spec.nl.df_growth.alpha + 1.0) > 1e-13,
        f"{spec.name}: direction must be nonzero",
    )


def _validate_composition(spec):
    try:
        ctx = CompositionContext(spec.nl, spec.q, "continuity", spec.domain)
        ctx._accept(spec.base_fn, "base")
        ctx._accept(spec.direction_fn, "direction")
        if spec.smoothness:
            CompositionContext(spec.nl, spec.q, "smoothness", spec.domain)
    except ValueError as exc:
        raise ConfigError(f"{spec.name}: {exc}") from exc
    _require(
        lp_norm(spec.direction_fn, 1.0) > 1e-13,
        f"{spec.name}: direction must be nonzero",
    )


def _validate_semiflow(spec):
    try:
        Semiflow(spec.cfg, spec.nl, spec.delay)
    except ValueError as exc:
        raise ConfigError(f"{spec.name}: {exc}") from exc
    _validate_problem(spec)
    _require(
        seminorm(spec.direction, spec.cfg) > 1e-13,
        f"{spec.name}: direction must be nonzero",
    )


def _validate_discontinuity(spec):
    _require(
        0 < spec.delay <= spec.cfg.R + 1e-12,
        f"{spec.name}: delay must lie in (0, R]",
    )


_VALIDATORS = {
    "solve": _validate_solve,
    "dependence": _validate_dependence,
    "lipschitz": _validate_lipschitz,
    "smooth": _validate_smooth,
    "semiflow": _validate_semiflow,
}


def parse_config(doc, global_seed):
    _require(isinstance(doc, dict), "config root must be an object")
    raw = doc.get("experiments", [])
    _require(isinstance(raw, list), "experiments must be a list")
    specs = [parse_experiment(entry, i, global_seed) for i, entry in enumerate(raw)]
    names = [s.name for s in specs]
    _require(len(set(names)) == len(names), "experiment names must be unique")
    return specs


# -- runners ----------------------------------------------------------------


def _run_solve(spec) -> ExperimentResult:
    pb = Problem(spec.cfg, spec.nl, spec.delay, spec.history)
    traj = solve(pb, spec.horizon, spec.quad)
    ts = np.linspace(-spec.cfg.R, spec.horizon, spec.grid)
    header = ["t"] + [f"x{j + 1}" for j in range(spec.cfg.N)]
    rows = [(float(t), *map(float, traj.x(float(t)))) for t in ts]
    cont = traj.continuity_defect()
    claims = [
        Claim(spec.name, "solve.continuity-defect", cont, 1e-9, cont <= 1e-9),
        Claim(
            spec.name,
            "solve.integration-defect",
            traj.integration_defect,
            1e-6,
            traj.integration_defect <= 1e-6,
        ),
    ]
    return ExperimentResult(spec.name, [("trajectory", header, rows)], claims)


def _run_dependence(spec) -> ExperimentResult:
    pb = Problem(spec.cfg, spec.nl, spec.delay, spec.history)
    base = solve(pb, spec.horizon, spec.quad)
    base_dev = base.deviation()
    fn, n = spec.nl.fn, spec.cfg.N
    rows, outs, worst = [], [], -math.inf
    for k in range(spec.count + 1):
        step = spec.direction.scale(2.0**-k)
        moved = spec.history + step
        traj = solve(Problem(spec.cfg, spec.nl, spec.delay, moved), spec.horizon, spec.quad)
        gap_in = seminorm(step, spec.cfg, spec.quad)
        gap_out = endpoint_lp_norm(traj.x - base.x, spec.cfg.p, spec.quad)
        ygap = sup_norm(traj.deviation() - base_dev, spec.quad)
        paired = stack((moved.rep, spec.history.rep))
        fgap = LazyComposition(paired, lambda v: fn(v[:, :n]) - fn(v[:, n:]), n)
        l1 = lp_norm(fgap, 1.0, spec.quad)
        rows.append((2.0**-k, gap_in, gap_out, ygap, l1))
        outs.append(gap_out)
        worst = max(worst, ygap - l1)
    cert = certify_decay(np.array(outs))
    claims = [
        Claim(
            spec.name, "dependence.gap-decay",
            cert.final_over_initial, 1e-3, bool(cert.passed),
        ),
        Claim(spec.name, "dependence.deviation-l1-bound", worst, 1e-8, worst <= 1e-8),
    ]
    header = ["scale", "input_gap", "output_gap", "deviation_gap_sup", "l1_bound"]
    return ExperimentResult(spec.name, [("gaps", header, rows)], claims)


def _run_lipschitz(spec) -> ExperimentResult:
    lip = spec.nl.df_growth.c2
    T, R = spec.horizon, spec.cfg.R
    stated = lip * T / (T + R + 1.0) + (1.0 + T)
    corrected = (1.0 + T) * (1.0 + lip)
    rng = np.random.default_rng(spec.seed)
    rows, worst = [], 0.0
    for i in range(spec.instances):
        phi1 = random_history(rng, spec.cfg, scale=spec.scale)
        if spec.adversarial and i % 3 == 2:
            # A short pulse just after -delay reaches the integrand early:
            # tiny input mass, output of one-step Lipschitz size, the regime
            # where the constant is tight.
            width = 0.01 * spec.cfg.R
            height = float(rng.uniform(0.5, 1.5))
            phi2 = phi1 + bump_history(spec.cfg, -spec.delay + width, width, height)
        else:
            phi2 = random_history(rng, spec.cfg, scale=spec.scale)
        gap_in = seminorm(phi1 - phi2, spec.cfg, spec.quad)
        if gap_in < 1e-13:
            continue
        x1 = solve(Problem(spec.cfg, spec.nl, spec.delay, phi1), T, spec.quad).x
        x2 = solve(Problem(spec.cfg, spec.nl, spec.delay, phi2), T, spec.quad).x
        gap_out = endpoint_lp_norm(x1 - x2, spec.cfg.p, spec.quad)
        ratio = gap_out / gap_in
        worst = max(worst, ratio)
        rows.append((i, gap_in, gap_out, ratio))
    claims = [
        Claim(
            spec.name, "lipschitz.stated-constant",
            worst, stated, worst <= stated + 1e-8,
        ),
        Claim(
            spec.name, "lipschitz.corrected-constant",
            worst, corrected, worst <= corrected + 1e-8,
        ),
    ]
    header = ["instance", "input_gap", "output_gap", "ratio"]
    return ExperimentResult(spec.name, [("ratios", header, rows)], claims)


def _run_smooth(spec) -> ExperimentResult:
    pb = Problem(spec.cfg, spec.nl, spec.delay, spec.history)
    ctx = DerivativeContext(pb, spec.horizon, spec.cfg.p)
    table = remainder_schedule(ctx, spec.direction, spec.count, spec.quad)
    cert = table.certificate()
    claims = [
        Claim(
            spec.name, "smooth.remainder-decay",
            cert.final_over_initial, 1e-3, bool(cert.passed),
        )
    ]
    alpha = spec.nl.df_growth.alpha
    bound = tangent_deviation_bound(ctx, spec.quad)
    probed = estimate_operator_norm(
        lambda chi: tangent_deviation(ctx, chi, spec.quad),
        lambda chi: lp_norm(chi.rep, alpha + 1.0, spec.quad),
        lambda f: sup_norm(f, spec.quad),
        spec.cfg,
        probes=spec.probes,
        seed=spec.seed,
        extra=[spec.direction],
    )
    claims.append(
        Claim(spec.name, "smooth.gain-bound", probed, bound, probed <= bound + 1e-8)
    )
    if spec.nl.df_lipschitz is not None:
        worst = -math.inf
        for k in range(spec.count + 1):
            chi = spec.direction.scale(2.0**-k)
            excess = table.remainders[k] - curvature_remainder_bound(ctx, chi, spec.quad)
            worst = max(worst, float(excess))
        claims.append(
            Claim(spec.name, "smooth.curvature-bound", worst, 1e-8, worst <= 1e-8)
        )
    header = ["scale", "remainder", "ratio"]
    return ExperimentResult(spec.name, [("remainder", header, table.as_rows())], claims)


def _run_composition(spec) -> ExperimentResult:
    ctx = CompositionContext(spec.nl, spec.q, "continuity", spec.domain)
    report = compose(ctx, spec.base_fn, spec.quad)
    gaps = continuity_probe(ctx, spec.base_fn, spec.direction_fn, spec.count, spec.quad)
    cert = gaps.certificate()
    claims = [
        Claim(
            spec.name, "composition.image-power-bound",
            report.norm**report.q, report.bound_power, bool(report.passed),
        ),
        Claim(
            spec.name, "composition.gap-decay",
            cert.final_over_initial, 1e-3, bool(cert.passed),
        ),
    ]
    tables = [("continuity", ["input_gap", "output_gap"], gaps.as_rows())]
    if spec.smoothness:
        sctx = CompositionContext(spec.nl, spec.q, "smoothness", spec.domain)
        dreport = apply_derivative(sctx, spec.base_fn, spec.direction_fn, spec.quad)
        rtable = smoothness_probe(sctx, spec.base_fn, spec.direction_fn, spec.count, spec.quad)
        rcert = rtable.certificate()
        claims.append(
            Claim(
                spec.name, "composition.derivative-gain",
                dreport.norm, dreport.gain_bound * dreport.direction_size,
                bool(dreport.passed),
            )
        )
        claims.append(
            Claim(
                spec.name, "composition.remainder-decay",
                rcert.final_over_initial, 1e-3, bool(rcert.passed),
            )
        )
        tables.append(("smoothness", ["scale", "remainder", "ratio"], rtable.as_rows()))
    return ExperimentResult(spec.name, tables, claims)


def _run_semiflow(spec) -> ExperimentResult:
    sf = Semiflow(spec.cfg, spec.nl, spec.delay)
    report = verify_semiflow(sf, spec.history, spec.direction, spec.count, spec.quad)
    rng = np.random.default_rng(spec.seed)
    variant = null_set_variant(spec.history, rng)
    qgap = quotient_invariance(sf, spec.delay, spec.history, variant, spec.quad)
    worst_stage = report.worst_composition_defect
    claims = [
        Claim(
            spec.name, "semiflow.identity-defect",
            report.identity_defect, 1e-12, report.identity_defect <= 1e-12,
        ),
        Claim(
            spec.name, "semiflow.stage-split-defect",
            worst_stage, 1e-9, worst_stage <= 1e-9,
        ),
        Claim(spec.name, "semiflow.quotient-invariance", qgap, 1e-10, qgap <= 1e-10),
    ]
    axiom_rows = [
        (t, s, float(d))
        for (t, s), d in zip(report.stage_pairs, report.composition_defects)
    ]
    tables = [("axioms", ["t", "s", "defect"], axiom_rows)]
    worst_tail, worst_excess = 0.0, -math.inf
    for i, mod in enumerate(report.modulus):
        cert = mod.gaps.certificate()
        worst_tail = max(worst_tail, cert.final_over_initial)
        excess = float(np.max(mod.gaps.output_gaps - mod.bounds))
        worst_excess = max(worst_excess, excess)
        rows = [
            (gin, gout, float(b))
            for (gin, gout), b in zip(mod.gaps.as_rows(), mod.bounds)
        ]
        tables.append(
            (f"modulus-{i + 1}", ["input_gap", "output_gap", "bound"], rows)
        )
    claims.append(
        Claim(
            spec.name, "semiflow.modulus-decay",
            worst_tail, 1e-3,
            all(m.gaps.certificate().passed for m in report.modulus),
        )
    )
    claims.append(
        Claim(
            spec.name, "semiflow.modulus-bound",
            worst_excess, 1e-8, worst_excess <= 1e-8,
        )
    )
    if report.remainder is not None:
        cert = report.remainder.certificate()
        claims.append(
            Claim(
                spec.name, "semiflow.remainder-decay",
                cert.final_over_initial, 1e-3, bool(cert.passed),
            )
        )
        tables.append(
            ("remainder", ["scale", "remainder", "ratio"], report.remainder.as_rows())
        )
    return ExperimentResult(spec.name, tables, claims)


def _run_discontinuity(spec) -> ExperimentResult:
    cfg, r = spec.cfg, spec.delay
    zero = HistoryElement.constant(np.zeros(cfg.N), cfg.R)
    rows, measured, output = [], [], []
    for k in range(spec.count + 1):
        n = 4**k
        lo, hi = -r - 1.0 / n, -r + 1.0 / n
        phi_n = indicator_history(cfg, lo, hi)
        gap = seminorm(phi_n - zero, cfg, spec.quad)
        analytic = (min(hi, 0.0) - max(lo, -cfg.R)) ** (1.0 / cfg.p)
        out = float(np.linalg.norm(spec.nl(phi_n(-r)) - spec.nl(zero(-r))))
        rows.append((n, gap, analytic, out))
        measured.append(gap)
        output.append(out)
    measured = np.array(measured)
    analytic_err = float(np.max(np.abs(measured - np.array([row[2] for row in rows]))))
    cert = certify_decay(measured)
    drift = float(np.max(np.abs(np.array(output) - output[0])))
    floor = float(np.min(output))
    claims = [
        Claim(
            spec.name, "discontinuity.input-gap-analytic",
            analytic_err, 1e-12, analytic_err <= 1e-12,
        ),
        Claim(
            spec.name, "discontinuity.input-gap-decay",
            cert.final_over_initial, 1e-3, bool(cert.passed),
        ),
        Claim(
            spec.name, "discontinuity.output-gap-constant",
            drift, 1e-12, drift <= 1e-12,
        ),
        Claim(
            spec.name, "discontinuity.output-gap-positive",
            floor, 1e-9, floor >= 1e-9, relation=">=",
        ),
    ]
    header = ["n", "input_gap", "analytic_gap", "output_gap"]
    return ExperimentResult(spec.name, [("gaps", header, rows)], claims)


_RUNNERS = {
    "solve": _run_solve,
    "dependence": _run_dependence,
    "lipschitz": _run_lipschitz,
    "smooth": _run_smooth,
    "composition": _run_composition,
    "semiflow": _run_semiflow,
    "discontinuity": _run_discontinuity,
}


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    return _RUNNERS[spec.kind](spec)


# -- output -----------------------------------------------------------------


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _default_demo(global_seed) -> ExperimentSpec:
    spec = ExperimentSpec(
        name="demo",
        kind="discontinuity",
        seed=global_seed,
        nl=cubic(),
        cfg=HistoryConfig(R=1.0, p=1.0, N=1),
        delay=0.5,
        count=12,
    )
    _validate_discontinuity(spec)
    return spec


# -- entry point ------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddehist",
        description="Run delay-equation experiments and certify their claims.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "solve": "run only the solve experiments from the config",
        "verify": "run every experiment in the config",
        "demo": "run the history-functional discontinuity demonstration",
    }
    for command, help_text in specs.items():
        p = sub.add_parser(command, help=help_text)
        p.add_argument("--config", help="path to a JSON experiment config")
        p.add_argument("--out", help="output directory for CSV artifacts")
        p.add_argument("--seed", type=int, default=0, help="global seed (u64)")
        p.add_argument("--jobs", type=int, default=1, help="concurrent experiments")
    return parser


def _resolve_out(args, doc) -> str:
    if args.out:
        return args.out
    env = os.environ.get(OUT_ENV_VAR)
    if env:
        return env
    if isinstance(doc, dict) and isinstance(doc.get("out"), str):
        return doc["out"]
    return os.path.join(".", "out")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if not 0 <= args.seed < 2**64:
        print("config error: seed must fit in u64", file=sys.stderr)
        return 2
    if args.jobs < 1:
        print("config error: jobs must be at least 1", file=sys.stderr)
        return 2
    if args.config is None and args.command != "demo":
        print("config error: --config is required", file=sys.stderr)
        return 2

    doc = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2

    try:
        specs = parse_config(doc, args.seed)
        if args.command == "solve":
            specs = [s for s in specs if s.kind == "solve"]
        elif args.command == "demo":
            specs = [s for s in specs if s.kind == "discontinuity"]
            if not specs and args.config is None:
                specs = [_default_demo(args.seed)]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if not specs:
        print("no experiments to run")
        return 0

    out_dir = _resolve_out(args, doc)
    os.makedirs(out_dir, exist_ok=True)

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        futures = [pool.submit(run_experiment, spec) for spec in specs]
        results = [f.result() for f in futures]

    failures = 0
    for result in results:
        for suffix, header, rows in result.tables:
            write_csv(os.path.join(out_dir, f"{result.name}-{suffix}.csv"), header, rows)
        for claim in result.claims:
            print(claim.line())
            failures += 0 if claim.passed else 1
    total = sum(len(r.claims) for r in results)
    if failures:
        print(f"{failures} of {total} claims failed")
        return 1
    print(f"all {total} claims passed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
