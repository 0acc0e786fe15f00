"""History-space tests.

Frozen expectations come from hand integration of polynomials and step
functions; the bound constants are checked on seeded corpora.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ddehist.corpus import (
    bump_history,
    indicator_history,
    null_set_variant,
    random_history,
    random_piecewise,
)
from ddehist.funcrep import DomainError, PiecewiseFunction, lp_norm, sup_norm
from ddehist.histspace import (
    HistoryConfig,
    HistoryElement,
    QuotientPair,
    endpoint_lp_norm,
    from_pair,
    history_segment,
    pair_norm,
    prolongation_constant,
    regulation_constant,
    seminorm,
    static_prolongation,
    to_pair,
)

RT3_INV = 0.5773502691896258  # (1/3)**0.5 by hand


def cfg1(p=1.0):
    return HistoryConfig(R=1.0, p=p, N=1)


# ---------------------------------------------------------------- seminorm


def test_seminorm_constant_history_p1():
    phi = HistoryElement.constant([1.0], R=1.0)
    # integral 1 + endpoint 1
    assert seminorm(phi, cfg1(1.0)) == pytest.approx(2.0, abs=1e-12)


def test_seminorm_identity_history_p2():
    phi = HistoryElement.from_power([-1.0, 0.0], [[[0.0, 1.0]]], endpoint_value=[0.0])
    assert seminorm(phi, cfg1(2.0)) == pytest.approx(RT3_INV, abs=1e-12)


def test_seminorm_pure_endpoint_mass():
    phi = HistoryElement.from_power([-1.0, 0.0], [[[0.0]]], endpoint_value=[1.0])
    for p in (1.0, 2.0, 3.0):
        assert seminorm(phi, cfg1(p)) == pytest.approx(1.0, abs=1e-13)


def test_seminorm_null_set_invariance():
    rng = np.random.default_rng(11)
    cfg = HistoryConfig(R=1.0, p=2.0, N=2)
    phi = random_history(rng, cfg, n_pieces=3, max_degree=3)
    psi = null_set_variant(phi, rng)
    assert seminorm(psi, cfg) == pytest.approx(seminorm(phi, cfg), abs=1e-11)
    gap = seminorm(phi - psi, cfg)
    assert gap <= 1e-10


def test_seminorm_checks_config():
    phi = HistoryElement.constant([1.0], R=2.0)
    with pytest.raises(DomainError):
        seminorm(phi, cfg1())


# ---------------------------------------------------------------- bar norm


def test_endpoint_lp_norm_constant():
    x = PiecewiseFunction.constant([1.0], (0.0, 1.0))
    assert endpoint_lp_norm(x, 1.0) == pytest.approx(2.0, abs=1e-13)
    assert endpoint_lp_norm(x, 2.0) == pytest.approx(2.0**0.5, abs=1e-13)


def test_endpoint_lp_norm_pure_tip():
    x = PiecewiseFunction.from_power([0.0, 1.0], [[[0.0]]], endpoint_value=[1.0])
    assert endpoint_lp_norm(x, 2.0) == pytest.approx(1.0, abs=1e-13)


# ------------------------------------------------------- static prolongation


def test_static_prolongation_freezes_endpoint():
    phi = HistoryElement.from_power([-1.0, 0.0], [[[0.0]]], endpoint_value=[1.0])
    bar = static_prolongation(phi, 2.0)
    assert bar.domain == (-1.0, 2.0)
    assert bar(1.3) == pytest.approx(1.0)
    assert bar(-0.5) == pytest.approx(0.0)
    assert bar(2.0) == pytest.approx(1.0)
    assert 0.0 in bar.breakpoints


def test_static_prolongation_equality_case():
    # phi = 0 a.e. with phi(0) = 1, T = 2, p = 1: the bound (1+T) is attained
    phi = HistoryElement.from_power([-1.0, 0.0], [[[0.0]]], endpoint_value=[1.0])
    bar = static_prolongation(phi, 2.0)
    cfg = cfg1(1.0)
    assert endpoint_lp_norm(bar, 1.0) == pytest.approx(3.0, abs=1e-12)
    assert endpoint_lp_norm(bar, 1.0) == pytest.approx(
        prolongation_constant(2.0, 1.0) * seminorm(phi, cfg), abs=1e-12
    )


@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
@pytest.mark.parametrize("T", [0.5, 1.0, 4.0])
def test_static_prolongation_bound_on_corpus(p, T):
    rng = np.random.default_rng(int(10 * p + T))
    cfg = HistoryConfig(R=1.5, p=p, N=2)
    for _ in range(20):
        phi = random_history(rng, cfg, n_pieces=int(rng.integers(1, 5)))
        bar = static_prolongation(phi, T)
        bound = prolongation_constant(T, p) * seminorm(phi, cfg)
        assert endpoint_lp_norm(bar, p) <= bound + 1e-8


# ---------------------------------------------------------------- regulation


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_regulation_bound_continuous_corpus(p):
    rng = np.random.default_rng(int(p))
    for _ in range(20):
        lo = float(rng.uniform(-2.0, 0.0))
        hi = lo + float(rng.uniform(0.5, 3.0))
        x = random_piecewise(
            rng, (lo, hi), n_pieces=3, max_degree=3, n_components=2, continuous=True
        )
        assert endpoint_lp_norm(x, p) <= regulation_constant(lo, hi, p) * sup_norm(x) + 1e-8


def test_regulation_equality_for_constants():
    x = PiecewiseFunction.constant([2.0], (0.0, 1.5))
    assert endpoint_lp_norm(x, 1.0) == pytest.approx(
        regulation_constant(0.0, 1.5, 1.0) * sup_norm(x), abs=1e-12
    )


# ---------------------------------------------------------------- segments


def glued_trajectory():
    # x = 1 on [-1, 0), x(t) = 1 + t on [0, 1]; continuous at 0
    return PiecewiseFunction.from_power(
        [-1.0, 0.0, 1.0], [[[1.0]], [[1.0, 1.0]]], endpoint_value=[2.0]
    )


def test_history_segment_at_terminal_time():
    seg = history_segment(glued_trajectory(), 1.0, R=1.0)
    # theta -> 2 + theta
    for theta in np.linspace(-1.0, 0.0, 9):
        assert np.allclose(seg(theta), 2.0 + theta, atol=1e-12)
    assert seg.value_at_zero == pytest.approx(2.0)


def test_history_segment_at_zero_recovers_history():
    x = glued_trajectory()
    seg = history_segment(x, 0.0, R=1.0)
    assert seg.value_at_zero == pytest.approx(1.0)
    for theta in np.linspace(-1.0, 0.0, 9)[:-1]:
        assert np.allclose(seg(theta), 1.0, atol=1e-12)


def test_history_segment_window_check():
    with pytest.raises(DomainError):
        history_segment(glued_trajectory(), 0.5, R=2.0)


# ---------------------------------------------------------------- quotient


def test_pair_round_trip_is_exact():
    rng = np.random.default_rng(3)
    cfg = HistoryConfig(R=1.0, p=2.0, N=2)
    phi = random_history(rng, cfg)
    back = from_pair(to_pair(phi))
    assert np.array_equal(back.rep.breakpoints, phi.rep.breakpoints)
    assert all(
        np.array_equal(a, b) for a, b in zip(back.rep.coeffs, phi.rep.coeffs)
    )
    assert np.array_equal(back.value_at_zero, phi.value_at_zero)


def test_pair_norm_isometry_examples():
    cfg = cfg1(1.0)
    phi = HistoryElement.from_power([-1.0, 0.0], [[[0.0]]], endpoint_value=[1.0])
    assert pair_norm(to_pair(phi), 1.0) == pytest.approx(seminorm(phi, cfg), abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    p=st.sampled_from([1.0, 2.0, 3.0]),
)
def test_pair_norm_isometry_random(seed, p):
    rng = np.random.default_rng(seed)
    cfg = HistoryConfig(R=1.0, p=p, N=int(rng.integers(1, 4)))
    phi = random_history(rng, cfg, n_pieces=int(rng.integers(1, 5)))
    assert pair_norm(to_pair(phi), p) == pytest.approx(seminorm(phi, cfg), abs=1e-10)


def test_pair_norm_forgets_ae_endpoint():
    # two pairs with the same class and eta but different stored endpoint
    # values on the representative are the same point of the quotient
    base = PiecewiseFunction.from_power([-1.0, 0.0], [[[0.5, 1.0]]])
    pair_a = QuotientPair(base, np.array([3.0]))
    pair_b = QuotientPair(base.with_endpoint([99.0]), np.array([3.0]))
    assert pair_norm(pair_a, 2.0) == pytest.approx(pair_norm(pair_b, 2.0), abs=1e-14)
    assert from_pair(pair_a).value_at_zero == pytest.approx(3.0)
    assert from_pair(pair_b).value_at_zero == pytest.approx(3.0)


# ---------------------------------------------------------------- indicators


def test_indicator_history_geometry():
    cfg = HistoryConfig(R=1.0, p=1.0, N=1)
    phi = bump_history(cfg, center=-0.5, halfwidth=0.01)
    assert phi(-0.5) == pytest.approx(1.0)
    assert phi(-0.95) == pytest.approx(0.0)
    assert phi(0.0) == pytest.approx(0.0)
    assert seminorm(phi, cfg) == pytest.approx(0.02, abs=1e-14)


def test_indicator_history_truncates_at_boundary():
    cfg = HistoryConfig(R=1.0, p=1.0, N=1)
    phi = indicator_history(cfg, -1.2, -0.9)
    assert seminorm(phi, cfg) == pytest.approx(0.1, abs=1e-14)
    assert phi(-1.0) == pytest.approx(1.0)


# ------------------------------------------------------------- prolongability


def test_segment_map_is_continuous_in_time():
    # globally continuous trajectory with gentle slopes: the seminorm gap of
    # nearby segments decays like the time offset
    x = PiecewiseFunction.from_power(
        [-1.0, 0.0, 2.0],
        [[[0.3, 0.3]], [[0.3, 0.3, -0.125]]],
        endpoint_value=[0.3 + 0.6 - 0.5],
    )
    cfg = HistoryConfig(R=1.0, p=2.0, N=1)
    t0 = 0.5
    base = history_segment(x, t0, R=1.0)
    gaps = []
    for k in range(21):
        seg = history_segment(x, t0 + 2.0**-k, R=1.0)
        gaps.append(seminorm(seg - base, cfg))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[20] <= 1e-6
