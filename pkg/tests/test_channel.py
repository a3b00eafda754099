import math

import numpy as np
import pytest

from xmaslink import channel as chan


@pytest.fixture(scope="module")
def ref_geom():
    return chan.reference_geometry()


@pytest.fixture(scope="module")
def ref_par(ref_geom):
    return chan.map_geometry(ref_geom)


def test_ratio_calibrated_at_reference(ref_par):
    assert abs(ref_par.ratio_c1_c2 - 1.0) < 1e-3


def test_ratio_vanishes_with_spacing():
    wide = chan.ChannelGeometry(1000.0, 0.36, 1.26, 8)
    assert chan.map_geometry(wide).ratio_c1_c2 < 1e-3


def test_ratio_independent_of_length(ref_geom, ref_par):
    doubled = chan.ChannelGeometry(ref_geom.spacing_um, ref_geom.width_um,
                                   2 * ref_geom.length_mm, ref_geom.n_wires)
    assert chan.map_geometry(doubled).ratio_c1_c2 == ref_par.ratio_c1_c2


def test_dc_transfer_is_unity(ref_geom, ref_par):
    fr = chan.frequency_response(ref_geom, ref_par, 0.0)
    np.testing.assert_allclose(fr["il_db"], 0.0, atol=1e-9)


def test_zero_coupling_fext_floor():
    geom = chan.ChannelGeometry(0.126, 0.36, 1.26, 2)
    par = chan.ParasiticSet(r_per_mm=135.0, cg_per_mm=300.0, c1_per_mm=0.0,
                            c2_per_mm=0.0, drv_resistance=50.0, load_cap_ff=5.0)
    fr = chan.frequency_response(geom, par, 5e9)
    assert fr["fext_db"][0][1] == chan.FEXT_FLOOR_DB


def test_single_wire_low_pass_pulse():
    geom = chan.ChannelGeometry(0.126, 0.36, 1.26, 1)
    par = chan.map_geometry(geom)
    prs = chan.pulse_responses(geom, par, 1e-10 / 64, 1e-10)
    main = prs.resp[0, 0]
    assert 0.1 < main.max() <= 1.0 + 1e-12
    assert abs(main[-1]) < prs.floor * main.max() + 1e-12


def test_three_wire_symmetry():
    geom = chan.ChannelGeometry(0.126, 0.36, 1.26, 3, layers=1)
    par = chan.map_geometry(geom)
    prs = chan.pulse_responses(geom, par, 1e-10 / 64, 1e-10)
    assert np.abs(prs.resp[1, 0] - prs.resp[1, 2]).max() < 1e-12


def test_passivity_proxy(reference_prs_10g):
    prs = reference_prs_10g
    assert np.abs(prs.resp).max() <= 1.0 + 1e-9
    for i in range(prs.n_wires):
        e_drv = np.sum(prs.resp[i, i] ** 2)
        for j in range(prs.n_wires):
            if j != i:
                assert np.sum(prs.resp[i, j] ** 2) < e_drv


def test_reciprocity(reference_prs_10g):
    prs = reference_prs_10g
    for i in range(prs.n_wires):
        for j in range(i + 1, prs.n_wires):
            assert np.abs(prs.resp[i, j] - prs.resp[j, i]).max() < 1e-9


def test_grid_refinement_convergence():
    geom = chan.ChannelGeometry(0.126, 0.36, 1.26, 2)
    par = chan.map_geometry(geom)
    T = 1e-10
    coarse = chan.pulse_responses(geom, par, T / 64, T)
    fine = chan.pulse_responses(geom, par, T / 128, T)
    peak = np.abs(coarse.resp).max()
    n = min(coarse.samples, fine.samples // 2)
    diff = np.abs(coarse.resp[:, :, :n] - fine.resp[:, :, ::2][:, :, :n]).max()
    assert diff < 0.01 * peak


def test_transient_frequency_consistency():
    """|DFT| of the box-deconvolved pulse response matches the nodal solve."""
    geom = chan.ChannelGeometry(0.126, 0.36, 1.26, 2)
    par = chan.map_geometry(geom)
    T = 1e-10
    prs = chan.pulse_responses(geom, par, T / 64, T)
    nyquist = 1.0 / (2 * T)
    pad = 1 << 14
    spec = np.fft.rfft(prs.resp[0, 0], pad) * prs.dt
    freqs = np.fft.rfftfreq(pad, prs.dt)
    # rectangular symbol pulse spectrum, same sampling convention
    box = np.zeros(prs.samples)
    box[:prs.samples_per_symbol] = 1.0
    box_spec = np.fft.rfft(box, pad) * prs.dt
    k = int(np.argmin(np.abs(freqs - nyquist)))
    h_transient = abs(spec[k]) / abs(box_spec[k])
    fr = chan.frequency_response(geom, par, freqs[k])
    h_nodal = 10 ** (fr["il_db"][0] / 20.0)
    assert abs(20 * math.log10(h_transient) - 20 * math.log10(h_nodal)) < 0.5


def test_truncation_error_when_window_too_small():
    geom = chan.ChannelGeometry(0.126, 0.36, 12.6, 2)  # 10x length: slow settling
    par = chan.map_geometry(geom)
    with pytest.raises(chan.TruncationError, match="extend"):
        chan.pulse_responses(geom, par, 1e-11 / 32, 1e-11, max_span=8)


def test_csv_roundtrip_bit_exact(tmp_path, reference_prs_10g):
    path = tmp_path / "resp.csv"
    chan.export_responses(reference_prs_10g, path)
    back = chan.import_responses(path)
    assert back.dt == reference_prs_10g.dt
    assert back.symbol_period == reference_prs_10g.symbol_period
    assert back.memory_span == reference_prs_10g.memory_span
    assert np.array_equal(back.resp, reference_prs_10g.resp)


def test_csv_header_mismatch(tmp_path):
    prs = chan.make_ideal_responses(2, 32, 2)
    path = tmp_path / "resp.csv"
    chan.export_responses(prs, path)
    text = path.read_text().splitlines()
    text[0] = text[0].replace("e_1_1", "e_9_9")
    path.write_text("\n".join(text) + "\n")
    with pytest.raises(ValueError, match="e_1_1"):
        chan.import_responses(path)


def test_csv_nonuniform_grid(tmp_path):
    prs = chan.make_ideal_responses(2, 32, 2)
    path = tmp_path / "resp.csv"
    chan.export_responses(prs, path)
    lines = path.read_text().splitlines()
    cells = lines[3].split(",")
    cells[0] = format(float(cells[0]) * 1.5 + 1e-12, ".17g")
    lines[3] = ",".join(cells)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError, match="uniform"):
        chan.import_responses(path)


def test_geometry_validation():
    with pytest.raises(ValueError):
        chan.ChannelGeometry(0.0, 0.36, 1.26, 8)
    with pytest.raises(ValueError):
        chan.ChannelGeometry(0.1, 0.36, 1.26, 8, layers=3)
    with pytest.raises(ValueError):
        chan.ChannelGeometry(0.1, 0.36, 1.26, 0)


def test_pulse_response_preconditions():
    geom = chan.ChannelGeometry(0.126, 0.36, 1.26, 2)
    par = chan.map_geometry(geom)
    with pytest.raises(ValueError, match="segments"):
        chan.pulse_responses(geom, par, 1e-12, 1e-10, segments=4)
    with pytest.raises(ValueError, match="dt"):
        chan.pulse_responses(geom, par, 1e-10 / 8, 1e-10)
