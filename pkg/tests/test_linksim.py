import numpy as np
import pytest

from xmaslink import channel as chan
from xmaslink import linksim as ls
from xmaslink import signaling as sig

from conftest import make_random_prs


def lfsr_period(kind):
    cfg = ls.PatternConfig(kind=kind, seed=1, length=1)
    order = 7 if kind == "prbs7" else 15
    stream = ls._lfsr_stream(order, ls.PRBS_TAPS[kind], 1, 3 * (2 ** order))
    # first recurrence of the full state sequence
    for period in range(1, len(stream)):
        if np.array_equal(stream[period:period + 2 * order], stream[:2 * order]):
            return period
    return None


def test_prbs7_period():
    assert lfsr_period("prbs7") == 127


def test_prbs_zero_seed_rejected():
    with pytest.raises(ValueError, match="nonzero"):
        ls.gen_pattern(ls.PatternConfig(kind="prbs7", seed=0, length=16), 2)


def test_prbs_lane_decimation():
    cfg = ls.PatternConfig(kind="prbs7", seed=9, length=40)
    lanes = ls.gen_pattern(cfg, 3)
    assert lanes.shape == (3, 40)
    master = ls._lfsr_stream(7, ls.PRBS_TAPS["prbs7"], 9, 3 * 40)
    np.testing.assert_array_equal(lanes[1], (2 * master[1::3] - 1)[:40])


def test_explicit_passthrough():
    bits = np.array([[1, -1, 1], [-1, -1, 1]], dtype=np.int8)
    out = ls.gen_pattern(ls.PatternConfig(kind="explicit", bits=bits), 2)
    np.testing.assert_array_equal(out, bits)
    with pytest.raises(ValueError, match="explicit"):
        ls.gen_pattern(ls.PatternConfig(kind="explicit"), 2)


def test_exhaustive_window_count():
    out = ls.gen_pattern(ls.PatternConfig(kind="exhaustive", length=3), 2)
    assert out.shape == (64, 2, 3)
    flat = {tuple(w.ravel()) for w in out}
    assert len(flat) == 64


def test_driver_current_differential_constant():
    diff = sig.baseline_scheme("differential", 2, 0.4)
    supply = ls.SupplyModel()
    plus = ls.driver_current(diff, [1], supply)
    minus = ls.driver_current(diff, [-1], supply)
    assert plus["total"] == minus["total"]


def test_driver_current_se_varies():
    se = sig.baseline_scheme("se", 2, 0.4)
    supply = ls.SupplyModel()
    both = ls.driver_current(se, [1, 1], supply)
    mixed = ls.driver_current(se, [1, -1], supply)
    assert both["total"] != mixed["total"]


def test_driver_current_constant_multiset_exact():
    toy = sig.toy_scheme_corrected()
    supply = ls.SupplyModel()
    totals = {ls.driver_current(toy, [a, b], supply)["total"]
              for a in (-1, 1) for b in (-1, 1)}
    assert len(totals) == 1  # bit-identical floats


def test_stream_too_short():
    prs = chan.make_ideal_responses(2, 32, 4)
    se = sig.baseline_scheme("se", 2, 0.4)
    prs_long_memory = chan.PulseResponseSet(dt=prs.dt, symbol_period=prs.symbol_period,
                                            resp=prs.resp, memory_span=3)
    with pytest.raises(ls.StreamTooShortError):
        ls.simulate_stream(se, prs_long_memory, np.ones((2, 2), dtype=int))


def test_dimension_mismatch():
    prs = chan.make_ideal_responses(2, 32, 4)
    toy = sig.toy_scheme_corrected()
    with pytest.raises(ValueError):
        ls.simulate_stream(toy, prs, np.ones((2, 8), dtype=int))


def test_superposition_linearity():
    rng = np.random.default_rng(5)
    prs = make_random_prs(rng, 3)
    toy = sig.toy_scheme_corrected()
    d1 = rng.choice([-1, 1], size=(2, 10))
    d2 = rng.choice([-1, 1], size=(2, 10))
    full = ls.simulate_stream(toy, prs, np.concatenate([d1, d2], axis=1))
    # the concatenated stream equals the sum of the two half-streams, one
    # shifted by 10 symbols, when each half is padded with mid-rail symbols
    spb = prs.samples_per_symbol
    y_full = full.decoded[0].samples
    base = 0.5 * 0.4
    lvl1 = 0.5 * 0.4 * (toy.tx_norm @ d1 + 1.0) - base
    lvl2 = 0.5 * 0.4 * (toy.tx_norm @ d2 + 1.0) - base
    y_manual = np.zeros_like(y_full)
    kernel = np.einsum("w,iwt->it", toy.rx.astype(float)[0], prs.resp)
    for k in range(10):
        for i in range(3):
            seg = slice(k * spb, k * spb + prs.samples)
            y_manual[seg] += (lvl1[i, k] + base) * kernel[i]
            seg2 = slice((k + 10) * spb, (k + 10) * spb + prs.samples)
            y_manual[seg2] += (lvl2[i, k] + base) * kernel[i]
    y_manual -= toy.thresholds[0]
    np.testing.assert_allclose(y_full, y_manual, atol=1e-12)


def test_shift_invariance():
    rng = np.random.default_rng(6)
    base = make_random_prs(rng, 2)
    spb = base.samples_per_symbol
    resp = base.resp.copy()
    resp[:, :, 3 * spb:] = 0.0  # hard-zero tails make the shift exact
    prs = chan.PulseResponseSet(dt=base.dt, symbol_period=base.symbol_period,
                                resp=resp, memory_span=3)
    se = sig.baseline_scheme("se", 2, 0.4)
    data = rng.choice([-1, 1], size=(2, 8))
    shifted = np.concatenate([rng.choice([-1, 1], size=(2, 1)), data], axis=1)
    out1 = ls.simulate_stream(se, prs, data).decoded[0].samples
    out2 = ls.simulate_stream(se, prs, shifted).decoded[0].samples
    # past the prepended symbol's (hard-zero) response, the delayed stream
    # is the original shifted by exactly one symbol period
    lo = 3 * spb
    np.testing.assert_allclose(out2[spb + lo:spb + len(out1)],
                               out1[lo:], atol=1e-12)


def test_zero_coupling_identity_matches_se():
    rng = np.random.default_rng(7)
    prs = make_random_prs(rng, 2)
    resp = prs.resp.copy()
    resp[0, 1] = 0.0
    resp[1, 0] = 0.0
    bare = chan.PulseResponseSet(dt=prs.dt, symbol_period=prs.symbol_period,
                                 resp=resp, memory_span=prs.memory_span)
    se = sig.baseline_scheme("se", 2, 0.4)
    xmas_identity = sig.make_scheme(np.eye(2, dtype=int), np.eye(2, dtype=int), 0.4,
                                    label="identity-as-affine")
    data = rng.choice([-1, 1], size=(2, 12))
    a = ls.simulate_stream(se, bare, data)
    b = ls.simulate_stream(xmas_identity, bare, data)
    for wa, wb in zip(a.decoded, b.decoded):
        assert np.array_equal(wa.samples, wb.samples)


def test_droop_nullity_for_constant_multiset():
    rng = np.random.default_rng(8)
    prs = make_random_prs(rng, 3)
    toy = sig.toy_scheme_corrected()
    supply = ls.SupplyModel(inductance_h=5e-9)
    data = rng.choice([-1, 1], size=(2, 16))
    res = ls.simulate_stream(toy, prs, data, supply)
    assert np.all(res.droop_v == 0.0)


def test_droop_hits_se_levels():
    rng = np.random.default_rng(9)
    prs = make_random_prs(rng, 2)
    se = sig.baseline_scheme("se", 2, 0.4)
    supply = ls.SupplyModel(inductance_h=5e-9)
    data = np.array([[1, -1, 1, -1, 1, -1], [1, -1, 1, -1, 1, -1]], dtype=int)
    res = ls.simulate_stream(se, prs, data, supply)
    assert np.abs(res.droop_v).max() > 0.0
    assert res.droop_v[0] == 0.0  # first symbol sees no current step


def test_waveform_csv(tmp_path):
    wave = ls.Waveform(1e-12, np.array([0.0, 0.5, -0.25]))
    path = tmp_path / "w.csv"
    ls.dump_waveform_csv(wave, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "time_s,value_v"
    assert len(lines) == 4
