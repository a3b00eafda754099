from fractions import Fraction

import numpy as np
import pytest

from xmaslink import signaling as sig


def test_l1_normalize_ninths_row():
    out = sig.l1_normalize([[0, 4, 3, 0, 0, 0, -2]])
    assert out[0] == [Fraction(0), Fraction(4, 9), Fraction(3, 9), Fraction(0),
                      Fraction(0), Fraction(0), Fraction(-2, 9)]


def test_l1_normalize_identity_row():
    assert sig.l1_normalize([[1]]) == [[Fraction(1)]]


def test_l1_normalize_rejects_zero_row():
    with pytest.raises(sig.DegenerateRowError, match="row 0"):
        sig.l1_normalize([[0, 0]])


def test_encode_full_swing_se():
    se = sig.baseline_scheme("se", 2, 0.4)
    np.testing.assert_allclose(sig.encode_symbol(se, [1, -1]), [0.4, 0.0])


def test_encode_weighted_row_level():
    # weights (4, 3, -2): data summing to +5 of 9 gives (5/9 + 1)/2 * vddq
    scheme = sig.make_scheme([[4, 3, -2], [1, 0, 0], [0, 1, 0]],
                             np.eye(3, dtype=int), 0.4)
    level = sig.encode_symbol(scheme, [1, 1, 1])[0]
    assert abs(level - (5 / 9 + 1) / 2 * 0.4) < 1e-15
    assert abs(level - 7 / 9 * 0.4) < 1e-15


def test_encode_corrected_toy_word():
    toy = sig.toy_scheme_corrected(0.4)
    np.testing.assert_allclose(sig.encode_symbol(toy, [1, 1]),
                               0.5 * 0.4 * np.array([0, -1, 1]) + 0.5 * 0.4)


def test_encode_dimension_mismatch():
    toy = sig.toy_scheme_corrected()
    with pytest.raises(ValueError):
        sig.encode_symbol(toy, [1, 1, 1])


def test_decode_four_wire_difference_row():
    rx = np.zeros((1, 8), dtype=int)
    rx[0, :4] = [-2, -2, 2, 2]
    tx = np.array([[-1], [-1], [1], [1], [1], [-1], [1], [-1]], dtype=int)
    scheme = sig.make_scheme(tx, rx, 0.4)
    y = np.arange(1.0, 9.0) * 0.01
    w, _ = sig.decode_samples(scheme, y)
    assert abs(w[0] - 2 * (y[2] - y[0] + y[3] - y[1])) < 1e-15


def test_decode_midscale_zero_bias_ties_to_one():
    toy = sig.toy_scheme_corrected(0.4)
    w, bits = sig.decode_samples(toy, [0.2, 0.2, 0.2])
    assert w[0] == 0.0
    assert bits[0] == 1  # w = 0 decodes +1 by convention
    # second output has a non-zero-bias row; threshold makes it bias-free
    assert abs(w[1]) < 1e-15
    assert bits[1] == 1


def test_certificate_identity():
    cert = sig.check_decodability(np.eye(3, dtype=int), np.eye(3, dtype=int))
    assert cert.monomial and cert.permutation == (0, 1, 2) and cert.gains == (1, 1, 1)


def test_certificate_printed_toy_fails():
    printed = sig.toy_scheme_printed()
    assert printed.cert.product == ((0, 2), (0, 4))
    assert not printed.cert.monomial


def test_certificate_corrected_toy_swaps():
    cor = sig.toy_scheme_corrected()
    assert cor.cert.product == ((0, 2), (4, 0))
    assert cor.cert.monomial
    assert cor.cert.permutation == (1, 0)
    assert cor.cert.gains == (2, 4)


def test_roundtrip_monomial_relabeling():
    cor = sig.toy_scheme_corrected()
    for bits in ([1, 1], [1, -1], [-1, 1], [-1, -1]):
        assert list(sig.roundtrip_bits(cor, bits)) == bits
    diff = sig.baseline_scheme("differential", 8, 0.4)
    assert list(sig.roundtrip_bits(diff, [1, -1, -1, 1])) == [1, -1, -1, 1]


def test_drive_level_multiset_differential():
    diff = sig.baseline_scheme("differential", 2, 0.4)
    rep = sig.drive_level_multiset(diff)
    assert rep.constant and rep.distinct
    assert rep.level_set == (0.0, 0.4)


def test_drive_level_multiset_se_varies():
    se = sig.baseline_scheme("se", 2, 0.4)
    assert not sig.drive_level_multiset(se).constant


def test_drive_level_budget_refusal():
    toy = sig.toy_scheme_corrected()
    with pytest.raises(sig.EnumerationBudgetError) as err:
        sig.drive_level_multiset(toy, budget=5)
    assert err.value.required == 3 * 4


def test_baselines():
    se = sig.baseline_scheme("se", 8, 0.4)
    assert se.pin_efficiency == 1.0 and se.cert.monomial
    diff = sig.baseline_scheme("differential", 8, 0.4)
    assert diff.pin_efficiency == 0.5 and diff.cert.monomial and diff.cert.zero_bias
    with pytest.raises(ValueError):
        sig.baseline_scheme("differential", 3, 0.4)
    with pytest.raises(ValueError):
        sig.baseline_scheme("se", 0, 0.4)


def test_encode_range_and_complement_symmetry():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, 5))
        tx = rng.integers(-8, 9, size=(n, m))
        if np.any(np.abs(tx).sum(axis=1) == 0):
            continue
        scheme = sig.make_scheme(tx, np.eye(m, n, dtype=int), 0.4)
        for _ in range(8):
            d = rng.choice([-1, 1], size=m)
            a = sig.encode_symbol(scheme, d)
            assert np.all(a >= -1e-12) and np.all(a <= 0.4 + 1e-12)
            np.testing.assert_allclose(sig.encode_symbol(scheme, -d), 0.4 - a, atol=1e-12)


def test_scheme_json_roundtrip(tmp_path):
    toy = sig.toy_scheme_corrected()
    path = tmp_path / "scheme.json"
    sig.save_scheme(toy, path)
    back = sig.load_scheme(path)
    assert np.array_equal(back.tx, toy.tx)
    assert np.array_equal(back.rx, toy.rx)
    assert back.vddq == toy.vddq


def test_matrix_json_shape_check():
    with pytest.raises(ValueError, match="shape"):
        sig.matrix_from_json({"rows": 2, "cols": 2, "entries": [[1, 2, 3], [4, 5, 6]]})
    with pytest.raises(ValueError, match="missing key"):
        sig.matrix_from_json({"rows": 2, "entries": [[1, 2]]})


def test_weight_bound_enforced():
    with pytest.raises(ValueError, match="weight bound"):
        sig.make_scheme([[9]], [[1]], 0.4)
    sig.make_scheme([[9]], [[1]], 0.4, weight_bound=None)
