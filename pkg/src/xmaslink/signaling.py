"""Affine encode / linear decode signaling schemes on integer matrices.

A scheme maps m data bits (+/-1) onto n wire voltages through an integer
transmit matrix whose rows are l1-normalized, and recovers the bits with an
integer receive matrix. The product rx @ tx must be a monomial matrix
(exactly one nonzero per row and per column) for the decode to be a scaled,
relabeled copy of the data; the certificate below records that structure.

All values are immutable after construction and every operation is a pure
function, so schemes can be shared freely across worker threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _rational

DEFAULT_WEIGHT_BOUND = 8
DEFAULT_ENUM_BUDGET = 1 << 22


class DegenerateRowError(ValueError):
    """A transmit row is all zero and cannot be l1-normalized."""


class EnumerationBudgetError(RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


def as_int_matrix(entries, weight_bound: int | None = DEFAULT_WEIGHT_BOUND) -> np.ndarray:
    """Validate and copy integer matrix entries into an ndarray.

    Raises ValueError on empty dimensions or on entries above the weight
    bound (pass weight_bound=None to skip the magnitude check).
    """
    mat = np.array(entries, dtype=np.int64)
    if mat.ndim != 2 or mat.shape[0] == 0 or mat.shape[1] == 0:
        raise ValueError(f"matrix must be 2-D with positive dimensions, got shape {mat.shape}")
    if weight_bound is not None and np.abs(mat).max(initial=0) > weight_bound:
        raise ValueError(
            f"entry magnitude {np.abs(mat).max()} exceeds weight bound {weight_bound}"
        )
    return mat


def l1_normalize(tx) -> list[list[Fraction]]:
    """Divide each row by its l1 norm, exactly.

    Every output row has l1 norm 1, which confines encoded voltages to
    [0, vddq]. All-zero rows are rejected because they carry no data and
    would divide by zero.
    """
    tx = np.asarray(tx, dtype=np.int64)
    out = []
    for idx, row in enumerate(tx):
        norm = int(np.abs(row).sum())
        if norm == 0:
            raise DegenerateRowError(f"degenerate all-zero row {idx}")
        out.append([Fraction(int(x), norm) for x in row])
    return out


@dataclass(frozen=True)
class DecodabilityCertificate:
    """Structure of rx @ tx, computed in exact integer arithmetic.

    monomial    -- product has exactly one nonzero per row and per column
    permutation -- data lane decoded by each output row (valid iff monomial)
    gains       -- the nonzero integer at (row, permutation[row])
    zero_bias   -- every rx row sums to zero, so the mid-rail bias cancels
                   without an explicit threshold
    product     -- the full integer product, for inspection
    """

    monomial: bool
    permutation: tuple[int, ...]
    gains: tuple[int, ...]
    zero_bias: bool
    product: tuple[tuple[int, ...], ...]


def check_decodability(tx, rx) -> DecodabilityCertificate:
    """Certify that rx @ tx is monomial; never raises, returns the evidence."""
    tx = np.asarray(tx, dtype=np.int64)
    rx = np.asarray(rx, dtype=np.int64)
    if rx.shape[1] != tx.shape[0] or rx.shape[0] != tx.shape[1]:
        raise ValueError(
            f"shape mismatch: rx is {rx.shape}, tx is {tx.shape}; need (m,n) @ (n,m)"
        )
    product = _rational.matmul_int(rx.tolist(), tx.tolist())
    m = len(product)
    perm: list[int] = []
    gains: list[int] = []
    monomial = True
    used_cols: set[int] = set()
    for row in product:
        nz = [j for j, v in enumerate(row) if v != 0]
        if len(nz) != 1 or nz[0] in used_cols:
            monomial = False
            break
        used_cols.add(nz[0])
        perm.append(nz[0])
        gains.append(row[nz[0]])
    if not monomial or len(perm) != m:
        perm, gains, monomial = [], [], False
    zero_bias = bool(np.all(rx.sum(axis=1) == 0))
    return DecodabilityCertificate(
        monomial=monomial,
        permutation=tuple(perm),
        gains=tuple(gains),
        zero_bias=zero_bias,
        product=tuple(tuple(int(v) for v in row) for row in product),
    )


@dataclass(frozen=True)
class SignalingScheme:
    """Immutable bundle of transmit/receive matrices and derived data.

    tx            -- (n, m) integer transmit matrix
    rx            -- (m, n) integer receive matrix
    vddq          -- output driver supply in volts
    tx_norm       -- float row-l1-normalized tx, used on numeric paths
    tx_norm_exact -- the same normalization as Fractions, used wherever
                     exact level arithmetic matters
    row_l1        -- per-row l1 norms of tx
    thresholds    -- rx applied to the mid-rail bias vector; subtracting it
                     makes the decode comparison bias-free
    cert          -- decodability certificate for rx @ tx
    label         -- free-form name used in reports
    """

    tx: np.ndarray
    rx: np.ndarray
    vddq: float
    tx_norm: np.ndarray
    tx_norm_exact: tuple[tuple[Fraction, ...], ...]
    row_l1: tuple[int, ...]
    thresholds: np.ndarray
    cert: DecodabilityCertificate
    label: str = "scheme"

    def __post_init__(self):
        self.tx.setflags(write=False)
        self.rx.setflags(write=False)
        self.tx_norm.setflags(write=False)
        self.thresholds.setflags(write=False)

    @property
    def n_wires(self) -> int:
        return self.tx.shape[0]

    @property
    def n_lanes(self) -> int:
        return self.tx.shape[1]

    @property
    def pin_efficiency(self) -> float:
        return self.n_lanes / self.n_wires

    def output_for_lane(self, lane: int) -> int:
        """Receive row that decodes the given data lane (monomial schemes)."""
        if not self.cert.monomial:
            raise ValueError("scheme is not decodable; no output/lane pairing exists")
        return self.cert.permutation.index(lane)


def make_scheme(tx, rx, vddq: float, label: str = "scheme",
                weight_bound: int | None = DEFAULT_WEIGHT_BOUND) -> SignalingScheme:
    """Build a SignalingScheme, computing normalization and certificate."""
    tx = as_int_matrix(tx, weight_bound)
    rx = as_int_matrix(rx, weight_bound)
    if vddq <= 0:
        raise ValueError(f"vddq must be positive, got {vddq}")
    exact = l1_normalize(tx)
    tx_norm = np.array([[float(f) for f in row] for row in exact])
    row_l1 = tuple(int(np.abs(r).sum()) for r in tx)
    cert = check_decodability(tx, rx)
    thresholds = 0.5 * vddq * rx.sum(axis=1).astype(float)
    return SignalingScheme(
        tx=tx, rx=rx, vddq=float(vddq), tx_norm=tx_norm,
        tx_norm_exact=tuple(tuple(row) for row in exact),
        row_l1=row_l1, thresholds=thresholds, cert=cert, label=label,
    )


def encode_symbol(scheme: SignalingScheme, bits: Sequence[int]) -> np.ndarray:
    """Map a +/-1 data word to the n wire voltages, all inside [0, vddq]."""
    d = np.asarray(bits, dtype=float)
    if d.shape != (scheme.n_lanes,):
        raise ValueError(f"expected {scheme.n_lanes} bits, got shape {d.shape}")
    return 0.5 * scheme.vddq * (scheme.tx_norm @ d + 1.0)


def encode_symbol_exact(scheme: SignalingScheme, bits: Sequence[int]) -> tuple[Fraction, ...]:
    """Encoded levels as exact fractions of vddq (level-multiset work)."""
    if len(bits) != scheme.n_lanes:
        raise ValueError(f"expected {scheme.n_lanes} bits, got {len(bits)}")
    out = []
    for row in scheme.tx_norm_exact:
        acc = sum((f * b for f, b in zip(row, bits)), Fraction(0))
        out.append((acc + 1) / 2)
    return tuple(out)


def decode_samples(scheme: SignalingScheme, wire_volts: Sequence[float]):
    """Linear decode of one received sample vector.

    Returns (w, bits): w is the thresholded analog decision value per lane
    output, bits its sign with the fixed tie rule that exactly 0 decodes
    as +1.
    """
    y = np.asarray(wire_volts, dtype=float)
    if y.shape != (scheme.n_wires,):
        raise ValueError(f"expected {scheme.n_wires} wire samples, got shape {y.shape}")
    w = scheme.rx.astype(float) @ y - scheme.thresholds
    bits = np.where(w >= 0.0, 1, -1)
    return w, bits


def roundtrip_bits(scheme: SignalingScheme, bits: Sequence[int]) -> np.ndarray:
    """Recovered data word for an ideal (identity, lossless) channel.

    Applies the certificate's permutation and gain signs so the result is
    directly comparable with the transmitted word.
    """
    _, raw = decode_samples(scheme, encode_symbol(scheme, bits))
    recovered = np.empty(scheme.n_lanes, dtype=int)
    for out_row, lane in enumerate(scheme.cert.permutation):
        sign = 1 if scheme.cert.gains[out_row] > 0 else -1
        recovered[lane] = sign * raw[out_row]
    return recovered


@dataclass(frozen=True)
class DriveLevelReport:
    """Whether the multiset of n encoded levels is the same for every word."""

    constant: bool
    level_set: tuple[float, ...]
    level_set_exact: tuple[Fraction, ...]
    distinct: bool
    words_checked: int


def drive_level_multiset(scheme: SignalingScheme,
                         budget: int = DEFAULT_ENUM_BUDGET) -> DriveLevelReport:
    """Enumerate all 2^m words and compare the encoded level multisets.

    A constant multiset is the property that nulls data-dependent supply
    current: the group of n drivers always outputs the same collection of
    voltages, merely permuted. Exact fractions avoid false multiset
    equality from float rounding.
    """
    m = scheme.n_lanes
    required = scheme.n_wires * (1 << m)
    if required > budget:
        raise EnumerationBudgetError(
            f"drive-level enumeration needs {required} evaluations, budget is {budget}",
            required=required,
        )
    reference: tuple[Fraction, ...] | None = None
    constant = True
    count = 0
    for word_idx in range(1 << m):
        bits = [1 if (word_idx >> l) & 1 else -1 for l in range(m)]
        multiset = tuple(sorted(encode_symbol_exact(scheme, bits)))
        count += 1
        if reference is None:
            reference = multiset
        elif multiset != reference:
            constant = False
            break
    assert reference is not None
    distinct = constant and len(set(reference)) == len(reference)
    return DriveLevelReport(
        constant=constant,
        level_set=tuple(float(f) * scheme.vddq for f in reference),
        level_set_exact=reference,
        distinct=distinct,
        words_checked=count,
    )


def baseline_scheme(kind: str, wires: int, vddq: float) -> SignalingScheme:
    """Single-ended or differential reference schemes.

    kind='se'            identity tx/rx, one lane per wire
    kind='differential'  one lane per wire pair, complementary drive
    """
    if wires < 1:
        raise ValueError(f"wires must be >= 1, got {wires}")
    if kind == "se":
        eye = np.eye(wires, dtype=np.int64)
        return make_scheme(eye, eye, vddq, label=f"se-{wires}")
    if kind == "differential":
        if wires % 2 != 0:
            raise ValueError(f"differential signaling needs an even wire count, got {wires}")
        m = wires // 2
        tx = np.zeros((wires, m), dtype=np.int64)
        rx = np.zeros((m, wires), dtype=np.int64)
        for lane in range(m):
            tx[2 * lane, lane] = 1
            tx[2 * lane + 1, lane] = -1
            rx[lane, 2 * lane] = 1
            rx[lane, 2 * lane + 1] = -1
        return make_scheme(tx, rx, vddq, label=f"diff-{wires}")
    raise ValueError(f"unknown baseline kind {kind!r} (expected 'se' or 'differential')")


# Three-wire, two-lane teaching fixtures. The "printed" variant's product
# rx @ tx = [[0,2],[0,4]] recovers lane 2 on both outputs and fails the
# monomial certificate; swapping the middle row's entries fixes it and also
# makes the drive-level multiset constant. Both ship so the failure mode
# stays visible in tests.
def toy_scheme_printed(vddq: float = 0.4) -> SignalingScheme:
    return make_scheme(
        [[1, -1], [0, -2], [1, 1]],
        [[-1, 0, 1], [0, -2, 0]],
        vddq,
        label="toy-printed",
    )


def toy_scheme_corrected(vddq: float = 0.4) -> SignalingScheme:
    return make_scheme(
        [[1, -1], [-2, 0], [1, 1]],
        [[-1, 0, 1], [0, -2, 0]],
        vddq,
        label="toy-corrected",
    )


# ---------------------------------------------------------------------------
# JSON wire formats


def matrix_to_json(mat) -> dict:
    mat = np.asarray(mat, dtype=np.int64)
    return {
        "rows": int(mat.shape[0]),
        "cols": int(mat.shape[1]),
        "entries": [[int(v) for v in row] for row in mat],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    for key in ("rows", "cols", "entries"):
        if key not in obj:
            raise ValueError(f"matrix JSON missing key {key!r}")
    mat = np.array(obj["entries"], dtype=np.int64)
    if mat.shape != (obj["rows"], obj["cols"]):
        raise ValueError(
            f"matrix JSON declares shape ({obj['rows']}, {obj['cols']}) "
            f"but entries have shape {mat.shape}"
        )
    return mat


def scheme_to_json(scheme: SignalingScheme) -> dict:
    return {
        "format_version": 1,
        "label": scheme.label,
        "tx": matrix_to_json(scheme.tx),
        "rx": matrix_to_json(scheme.rx),
        "vddq": scheme.vddq,
    }


def scheme_from_json(obj: dict) -> SignalingScheme:
    for key in ("tx", "rx", "vddq"):
        if key not in obj:
            raise ValueError(f"scheme JSON missing key {key!r}")
    return make_scheme(
        matrix_from_json(obj["tx"]),
        matrix_from_json(obj["rx"]),
        float(obj["vddq"]),
        label=str(obj.get("label", "scheme")),
        weight_bound=None,
    )


def save_scheme(scheme: SignalingScheme, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scheme_to_json(scheme), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_scheme(path) -> SignalingScheme:
    with open(path, "r", encoding="utf-8") as fh:
        return scheme_from_json(json.load(fh))
