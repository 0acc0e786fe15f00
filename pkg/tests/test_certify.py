"""Certificate logic tests on hand-built sequences."""

import numpy as np
import pytest

from ddehist.certify import (
    BoundPair,
    GapTable,
    RemainderTable,
    certify_decay,
    halving,
)


class TestCertifyDecay:
    def test_quadratic_remainder_ratios_pass(self):
        # Ratios 2^-k: monotone from the start, final/initial = 2^-12.
        cert = certify_decay(0.5 ** np.arange(13))
        assert cert.passed
        assert cert.tail_start == 0
        assert cert.final_over_initial == pytest.approx(2.0**-12)

    def test_constant_ratios_fail_the_final_test(self):
        cert = certify_decay(np.full(13, 0.5))
        assert not cert.passed
        assert "final/initial" in cert.reason

    def test_late_bump_breaks_monotonicity(self):
        v = 0.5 ** np.arange(13.0)
        v[10] = 1.0
        cert = certify_decay(v)
        assert not cert.passed
        assert cert.tail_start == -1

    def test_early_wiggle_is_forgiven(self):
        # A noisy head is fine as long as some tail in the first half decays.
        v = 0.5 ** np.arange(13.0)
        v[1] = 2.0
        assert certify_decay(v).passed

    def test_noise_floor_absorbs_bouncing_tiny_values(self):
        v = np.concatenate([0.5 ** np.arange(9.0), [1e-15, 1e-16, 1e-14, 1e-15]])
        cert = certify_decay(v)
        assert cert.passed

    def test_all_noise_passes_trivially(self):
        cert = certify_decay(np.full(6, 1e-14))
        assert cert.passed
        assert "noise floor" in cert.reason

    def test_bad_input_rejected(self):
        with pytest.raises(ValueError):
            certify_decay([1.0, 0.5, 0.25])
        with pytest.raises(ValueError):
            certify_decay([1.0, -0.5, 0.25, 0.1])
        with pytest.raises(ValueError):
            certify_decay([1.0, np.nan, 0.25, 0.1])


class TestTables:
    def test_remainder_table_ratios_and_certificate(self):
        scales = 0.5 ** np.arange(13)
        table = RemainderTable(scales, scales**2)
        np.testing.assert_allclose(table.ratios, scales)
        assert table.certificate().passed
        rows = table.as_rows()
        assert len(rows) == 13
        assert rows[3] == pytest.approx((0.125, 0.015625, 0.125))

    def test_remainder_table_requires_decreasing_scales(self):
        with pytest.raises(ValueError):
            RemainderTable(np.array([1.0, 1.0, 0.5]), np.zeros(3))
        with pytest.raises(ValueError):
            RemainderTable(np.array([0.5, 1.0]), np.zeros(2))

    def test_gap_table_certifies_output_gaps(self):
        ins = 0.5 ** np.arange(13)
        table = GapTable(ins, 3.0 * ins)
        assert table.certificate().passed
        stalled = GapTable(ins, np.full(13, 0.2))
        assert not stalled.certificate().passed

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            GapTable(np.array([1.0, 0.5]), np.array([1.0]))


class TestBoundPair:
    def test_probe_below_bound_passes(self):
        check = BoundPair(probed=0.97, bound=1.0)
        assert check.passed
        assert check.slack == pytest.approx(0.03 + 1e-8)

    def test_probe_above_bound_fails(self):
        assert not BoundPair(probed=1.2, bound=1.0).passed

    def test_tolerance_absorbs_rounding(self):
        assert BoundPair(probed=1.0 + 5e-9, bound=1.0).passed


def test_halving_schedule():
    np.testing.assert_allclose(halving(4), [1.0, 0.5, 0.25, 0.125, 0.0625])
    with pytest.raises(ValueError):
        halving(2)
