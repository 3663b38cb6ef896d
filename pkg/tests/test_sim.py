import csv
import io

import numpy as np
import pytest

from twostage_ldpc.bp import DecoderConfig
from twostage_ldpc.code_model import make_regular_code
from twostage_ldpc.sim import (
    CSV_COLUMNS,
    SimConfig,
    channel_batch,
    format_csv,
    format_failures,
    run_point,
    run_sweep,
    wilson_interval,
)


@pytest.fixture(scope="module")
def code96():
    return make_regular_code(96, 3, 6, seed=2)


def quick(**kw):
    base = dict(snr_points=[2.0], decoders=["standard"], trials=200, min_block_errors=0,
                seed=7, decoder=DecoderConfig(max_iters=20), batch_size=64)
    base.update(kw)
    return SimConfig(**base)


@pytest.mark.parametrize("dec", ["standard", "avg", "sel", "twostage"])
def test_noiseless_point(code96, dec):
    s = run_point(code96, dec, 100.0, quick(trials=100))
    assert (s.trials, s.bit_errors, s.block_errors) == (100, 0, 0)
    assert s.mean_iters == 0


def test_repeat_is_identical(code96):
    a = run_point(code96, "twostage", 1.5, quick())
    b = run_point(code96, "twostage", 1.5, quick())
    assert a.csv_row() == b.csv_row()
    assert a.failures == b.failures


@pytest.mark.parametrize("batch", [1, 17, 200])
def test_batch_size_does_not_matter(code96, batch):
    ref = run_point(code96, "sel", 1.5, quick(batch_size=64), keep_trials=True)
    got = run_point(code96, "sel", 1.5, quick(batch_size=batch), keep_trials=True)
    assert got.csv_row() == ref.csv_row()
    np.testing.assert_array_equal(got.trial_bit_errors, ref.trial_bit_errors)


def test_trial_streams_are_order_free(code96):
    fwd = channel_batch(96, 2.0, 0.5, 7, 0, range(0, 10))
    rev = channel_batch(96, 2.0, 0.5, 7, 0, range(9, -1, -1))
    np.testing.assert_array_equal(fwd, rev[::-1])
    # and shared by every decoder at a point
    np.testing.assert_array_equal(fwd[3], channel_batch(96, 2.0, 0.5, 7, 0, range(3, 4))[0])


def test_counter_conservation(code96):
    s = run_point(code96, "twostage", 1.0, quick(decoder=DecoderConfig(max_iters=5, cn_threshold=30)),
                  keep_trials=True)
    assert s.block_errors <= s.trials
    assert s.bit_errors <= s.trials * s.n_vars
    assert s.stage2_resolved <= s.stage2_invoked
    assert s.bit_errors == s.trial_bit_errors.sum()
    assert s.block_errors == (s.trial_bit_errors > 0).sum() == len(s.failures)
    assert s.ber == s.bit_errors / (s.trials * 96) and s.bler == s.block_errors / s.trials
    lo, hi = s.bler_ci
    assert lo <= s.bler <= hi


def test_early_stop_is_exact(code96):
    cfg = quick(trials=2000, min_block_errors=5, batch_size=300)
    s = run_point(code96, "standard", 1.0, cfg)
    full = run_point(code96, "standard", 1.0, quick(trials=s.trials, batch_size=300), keep_trials=True)
    assert s.block_errors == 5
    assert full.trial_bit_errors[-1] > 0          # stopped on the 5th error
    assert (full.trial_bit_errors > 0).sum() == 5


def test_min_trials_floor(code96):
    s = run_point(code96, "standard", 1.0, quick(trials=2000, min_block_errors=1, min_trials=150))
    assert s.trials >= 150 and s.block_errors >= 1


def test_sweep_order_and_csv(code96):
    cfg = quick(snr_points=[100.0, 50.0], decoders=["avg", "standard"], trials=20)
    rows = run_sweep(code96, cfg)
    assert [(r.decoder, r.snr_db) for r in rows] == [("avg", 100.0), ("avg", 50.0),
                                                      ("standard", 100.0), ("standard", 50.0)]
    text = format_csv(rows)
    lines = text.split("\n")
    assert lines[0] == ("decoder,snr_db,trials,bit_errors,block_errors,ber,bler,bler_ci_lo,"
                        "bler_ci_hi,mean_iters,stage2_invoked,stage2_resolved,seed")
    assert tuple(lines[0].split(",")) == CSV_COLUMNS
    assert "\r" not in text and text.endswith("\n") and len(lines) == 6
    assert lines[1] == "avg,100,20,0,0,0,0,0,0.161125,0,0,0,7"
    # Wilson upper bound at k = 0 is z^2 / (n + z^2)
    assert float(lines[1].split(",")[8]) == pytest.approx(1.959964**2 / (20 + 1.959964**2), abs=1e-6)


def test_six_significant_digits(code96):
    s = run_point(code96, "standard", 1.0, quick(trials=300))
    rec = dict(zip(CSV_COLUMNS, s.csv_row()))
    assert rec["ber"] == f"{s.ber:.6g}"
    assert len(rec["bler_ci_hi"].lstrip("0.").replace(".", "")) <= 6


def test_failure_dump(code96):
    rows = run_sweep(code96, quick(snr_points=[1.0], decoders=["standard", "twostage"], trials=100,
                                   decoder=DecoderConfig(max_iters=10, cn_threshold=30)))
    recs = list(csv.DictReader(io.StringIO(format_failures(rows))))
    assert len(recs) == sum(r.block_errors for r in rows)
    assert {r["stage"] for r in recs} <= {"stage1", "stage2"}
    assert all(int(r["unsatisfied"]) >= 0 for r in recs)


class TestWilson:
    def test_brackets_estimate(self):
        for k, n in [(0, 10), (3, 10), (10, 10), (7, 20000)]:
            lo, hi = wilson_interval(k, n)
            assert 0 <= lo <= k / n <= hi <= 1

    def test_reference_value(self):
        # closed form (p + z^2/2n +- z sqrt(p(1-p)/n + z^2/4n^2)) / (1 + z^2/n), z = 1.959964
        z, k, n = 1.959963984540054, 5, 100
        p = k / n
        centre = (p + z * z / (2 * n)) / (1 + z * z / n)
        half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
        np.testing.assert_allclose(wilson_interval(k, n), (centre - half, centre + half), rtol=1e-9)

    def test_narrows_with_n(self):
        widths = [np.subtract(*wilson_interval(n // 10, n)[::-1]) for n in (10, 100, 1000, 10000)]
        assert all(a > b for a, b in zip(widths, widths[1:]))


@pytest.mark.parametrize("kw", [dict(trials=0), dict(snr_points=[]), dict(decoders=[]),
                                dict(decoders=["bogus"]), dict(seed=-1), dict(batch_size=0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        quick(**kw)
