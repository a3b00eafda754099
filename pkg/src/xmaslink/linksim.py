"""Waveform-level link simulation by superposition of pulse responses.

A data stream drives per-symbol encoded levels; every wire output is the
superposition of level-weighted, symbol-shifted single-bit-pulse responses,
and the decoded outputs apply the receive matrix and thresholds sample by
sample. Supply droop is modeled behaviorally: drivers draw a static current
proportional to their output level, and a change of total current between
consecutive symbols rings the shared supply inductance, perturbing the next
symbol's levels. Schemes with a constant drive-level multiset draw exactly
the same current for every word, so their droop is identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.signal import fftconvolve

from .channel import PulseResponseSet
from .signaling import SignalingScheme, encode_symbol_exact

PRBS_TAPS = {
    "prbs7": (7, 6),    # x^7 + x^6 + 1
    "prbs15": (15, 14),  # x^15 + x^14 + 1
}


@dataclass(frozen=True)
class Waveform:
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("waveform samples must be finite")
        self.samples.setflags(write=False)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.dt


@dataclass(frozen=True)
class SupplyModel:
    """Lumped shared supply: inductance plus a per-driver static conductance."""

    inductance_h: float = 0.0
    nominal_vddq: float = 0.4
    driver_conductance_s: float = 2e-3

    def __post_init__(self):
        if self.inductance_h < 0:
            raise ValueError("inductance must be nonnegative")


@dataclass(frozen=True)
class PatternConfig:
    kind: str = "prbs7"          # prbs7 | prbs15 | exhaustive | explicit
    seed: int = 1
    length: int = 127            # symbols (window size for exhaustive)
    bits: np.ndarray | None = None  # explicit (m, K) +/-1 array


def _lfsr_stream(order: int, taps: tuple[int, int], seed: int, count: int) -> np.ndarray:
    """Fibonacci LFSR bit stream (0/1), MSB-out."""
    mask = (1 << order) - 1
    state = seed & mask
    if state == 0:
        raise ValueError("PRBS seed must be nonzero")
    out = np.empty(count, dtype=np.int8)
    t0, t1 = taps
    for k in range(count):
        bit = (state >> (order - 1)) & 1
        out[k] = bit
        fb = ((state >> (t0 - 1)) ^ (state >> (t1 - 1))) & 1
        state = ((state << 1) | fb) & mask
    return out


def gen_pattern(cfg: PatternConfig, n_lanes: int) -> np.ndarray:
    """Produce +/-1 data for n_lanes lanes.

    prbs7/prbs15: one master LFSR stream of n_lanes*length bits, decimated
    so lane l takes bits l, l+m, l+2m, ... (lanes see offset copies of the
    same sequence). explicit passes cfg.bits through after validation.
    exhaustive returns all 2^(m*window) windows stacked as an array of
    shape (2^(m*window), n_lanes, window), for oracle use only.
    """
    if cfg.kind in PRBS_TAPS:
        order, taps = (7, PRBS_TAPS["prbs7"]) if cfg.kind == "prbs7" else (15, PRBS_TAPS["prbs15"])
        master = _lfsr_stream(order, taps, cfg.seed, n_lanes * cfg.length)
        lanes = np.stack([master[l::n_lanes][:cfg.length] for l in range(n_lanes)])
        return (2 * lanes - 1).astype(np.int8)
    if cfg.kind == "explicit":
        if cfg.bits is None:
            raise ValueError("explicit pattern requires cfg.bits")
        bits = np.asarray(cfg.bits, dtype=np.int8)
        if bits.ndim != 2 or bits.shape[0] != n_lanes:
            raise ValueError(f"explicit bits must be ({n_lanes}, K), got {bits.shape}")
        if not np.all(np.isin(bits, (-1, 1))):
            raise ValueError("explicit bits must be +/-1")
        return bits
    if cfg.kind == "exhaustive":
        window = cfg.length
        bits_total = n_lanes * window
        if bits_total > 24:
            raise ValueError(
                f"exhaustive pattern of {bits_total} bits is too large to enumerate"
            )
        count = 1 << bits_total
        out = np.empty((count, n_lanes, window), dtype=np.int8)
        for idx in range(count):
            for pos in range(bits_total):
                lane, sym = divmod(pos, window)
                out[idx, lane, sym] = 1 if (idx >> pos) & 1 else -1
        return out
    raise ValueError(f"unknown pattern kind {cfg.kind!r}")


def driver_current(scheme: SignalingScheme, bits, supply: SupplyModel) -> dict:
    """Static supply current for one data word.

    Each driver is a resistive divider whose tap sets its level; the current
    it pulls from the supply is conductance * level. The total is computed
    in exact rational arithmetic so that schemes with a constant drive-level
    multiset give bit-identical totals for every word.
    """
    levels_frac = encode_symbol_exact(scheme, list(bits))
    g = supply.driver_conductance_s
    per_driver = np.array([g * float(f) * scheme.vddq for f in levels_frac])
    total_frac = sum(levels_frac, Fraction(0))
    total = g * scheme.vddq * float(total_frac)
    return {"per_driver": per_driver, "total": total, "total_exact": total_frac}


def current_extremes(scheme: SignalingScheme, supply: SupplyModel) -> tuple[float, float]:
    """(min, max) total static current over all 2^m words, exact reduction."""
    m = scheme.n_lanes
    lo = hi = None
    for word in range(1 << m):
        bits = [1 if (word >> l) & 1 else -1 for l in range(m)]
        tot = sum(encode_symbol_exact(scheme, bits), Fraction(0))
        lo = tot if lo is None or tot < lo else lo
        hi = tot if hi is None or tot > hi else hi
    scale = supply.driver_conductance_s * scheme.vddq
    return scale * float(lo), scale * float(hi)


def stream_levels(scheme: SignalingScheme, data: np.ndarray, symbol_period: float,
                  supply: SupplyModel | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-symbol drive levels (n, K) and the supply sag hitting each symbol.

    Droop for symbol k comes from the total-current step into symbol k:
    L * (i_k - i_{k-1}) / T, applied as a supply sag scaling symbol k's
    levels. Currents are reduced exactly, so constant-multiset schemes sag
    by exactly zero. The first symbol sees no step.
    """
    _, n_symbols = data.shape
    levels = 0.5 * scheme.vddq * (scheme.tx_norm @ data + 1.0)
    droop_v = np.zeros(n_symbols)
    if supply is not None and supply.inductance_h > 0:
        totals = []
        for k in range(n_symbols):
            frac = sum(encode_symbol_exact(scheme, data[:, k].tolist()), Fraction(0))
            totals.append(frac)
        scale = supply.driver_conductance_s * scheme.vddq
        currents = np.array([scale * float(f) for f in totals])
        delta = np.diff(currents, prepend=currents[0])
        droop_v = supply.inductance_h * delta / symbol_period
        levels = levels * (1.0 - droop_v / scheme.vddq)
    return levels, droop_v


class StreamTooShortError(ValueError):
    pass


@dataclass(frozen=True)
class StreamResult:
    dt: float
    symbol_period: float
    wires: list[Waveform]
    decoded: list[Waveform]
    droop_v: np.ndarray  # per-symbol supply sag, volts


def simulate_stream(scheme: SignalingScheme, prs: PulseResponseSet, data,
                    supply: SupplyModel | None = None) -> StreamResult:
    """Superpose pulse responses for a full data stream and decode.

    data is (m, K) +/-1. Wire j's waveform is
    sum_k sum_i levels[i, k] * resp[i, j](t - k T); decoded outputs apply
    the receive rows and subtract the bias thresholds at every sample.
    """
    data = np.asarray(data)
    if data.ndim != 2 or data.shape[0] != scheme.n_lanes:
        raise ValueError(f"data must be ({scheme.n_lanes}, K), got {data.shape}")
    if prs.n_wires != scheme.n_wires:
        raise ValueError(
            f"pulse responses are for {prs.n_wires} wires, scheme drives {scheme.n_wires}"
        )
    n_symbols = data.shape[1]
    if n_symbols < prs.memory_span:
        raise StreamTooShortError(
            f"need at least memory_span={prs.memory_span} symbols, got {n_symbols}"
        )
    spb = prs.samples_per_symbol
    levels, droop_v = stream_levels(scheme, data, prs.symbol_period, supply)
    out_len = (n_symbols - 1) * spb + prs.samples
    impulses = np.zeros((scheme.n_wires, (n_symbols - 1) * spb + 1))
    impulses[:, ::spb] = levels
    wires = np.zeros((scheme.n_wires, out_len))
    for i in range(scheme.n_wires):
        for j in range(scheme.n_wires):
            if np.any(prs.resp[i, j]):
                wires[j] += fftconvolve(impulses[i], prs.resp[i, j])[:out_len]
    decoded = scheme.rx.astype(float) @ wires - scheme.thresholds[:, None]
    return StreamResult(
        dt=prs.dt,
        symbol_period=prs.symbol_period,
        wires=[Waveform(prs.dt, w) for w in wires],
        decoded=[Waveform(prs.dt, w) for w in decoded],
        droop_v=droop_v,
    )


def dump_waveform_csv(wave: Waveform, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("time_s,value_v\n")
        for k, v in enumerate(wave.samples):
            fh.write(f"{format(k * wave.dt, '.17g')},{format(v, '.17g')}\n")
