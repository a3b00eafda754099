"""Coupled-wire channel synthesis, transient and frequency-domain solvers.

The physical picture: n minimum-pitch wires routed on one or two metal
layers. On a two-layer stack the wires alternate layers, so wire i sees
wires i+-1 on the other layer (coupling c2 per length) and wires i+-2 on its
own layer across the spacing S (coupling c1 per length). Couplings beyond
those four neighbors are dropped; they are negligible at these geometries.

The electrical model is an n-wire segmented RC ladder: series resistance per
segment, ground capacitance per segment, neighbor coupling capacitance per
segment, a resistive driver at the near end and a small capacitive load at
the far (unterminated) end. The transient solver integrates the nodal
equations C dv/dt + G v = b(t) with the trapezoidal rule (A-stable) and
records far-end voltages for a one-symbol rectangular pulse on each wire in
turn; the frequency solver solves (G + j 2 pi f C) v = b directly.

Per-length parasitics come from a parallel-plate-plus-fringe fit with
calibration constants; the constants are data (see CalibrationConstants),
fitted once so the reference geometry (S, W, L) = (0.126 um, 0.36 um,
1.26 mm) lands on its published operating point: same-layer/other-layer
coupling ratio 1.0, ~10 dB insertion loss and ~ -24 dB nearest-neighbor
far-end crosstalk at 5 GHz.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import scipy.linalg

FEXT_FLOOR_DB = -200.0


class TruncationError(RuntimeError):
    """Responses still above the floor at the end of the largest window."""


class IllConditionedNetworkError(RuntimeError):
    """The nodal system could not be solved reliably."""


@dataclass(frozen=True)
class CalibrationConstants:
    """Fitted constants of the parasitic model. Units commented per field.

    c1 = k_c1 / S, c2 = k_c2 * W, cg = k_cg_area * W + k_cg_fringe,
    r = k_r / W, with S and W in micrometers.
    """

    k_c1: float = 9.68801           # fF*um/mm   same-layer lateral coupling
    k_c2: float = 213.5806          # fF/(um*mm) inter-layer parallel plate
    k_cg_area: float = 674.2813     # fF/(um*mm) ground plate
    k_cg_fringe: float = 80.9138    # fF/mm      ground fringe
    k_r: float = 48.6               # ohm*um/mm  sheet resistance / width
    drv_resistance: float = 50.0    # ohm        driver source resistance
    load_cap_ff: float = 5.0        # fF         receiver input load


DEFAULT_CALIBRATION = CalibrationConstants()


@dataclass(frozen=True)
class ChannelGeometry:
    spacing_um: float
    width_um: float
    length_mm: float
    n_wires: int
    layers: int = 2

    def __post_init__(self):
        if self.spacing_um <= 0 or self.width_um <= 0 or self.length_mm <= 0:
            raise ValueError("spacing, width and length must all be positive")
        if self.n_wires < 1:
            raise ValueError(f"n_wires must be >= 1, got {self.n_wires}")
        if self.layers not in (1, 2):
            raise ValueError(f"layers must be 1 or 2, got {self.layers}")

    @property
    def pitch_um(self) -> float:
        return self.spacing_um + self.width_um


def reference_geometry(n_wires: int = 8, layers: int = 2) -> ChannelGeometry:
    """The calibrated operating point used across tests and demos."""
    return ChannelGeometry(spacing_um=0.126, width_um=0.36, length_mm=1.26,
                           n_wires=n_wires, layers=layers)


@dataclass(frozen=True)
class ParasiticSet:
    r_per_mm: float        # ohm/mm
    cg_per_mm: float       # fF/mm
    c1_per_mm: float       # fF/mm, same-layer neighbor
    c2_per_mm: float       # fF/mm, other-layer neighbor
    drv_resistance: float  # ohm
    load_cap_ff: float     # fF

    def __post_init__(self):
        vals = (self.r_per_mm, self.cg_per_mm, self.c1_per_mm, self.c2_per_mm,
                self.drv_resistance, self.load_cap_ff)
        if any(v < 0 for v in vals):
            raise ValueError("parasitics must be nonnegative")

    @property
    def ratio_c1_c2(self) -> float:
        if self.c2_per_mm == 0:
            return math.inf if self.c1_per_mm > 0 else 0.0
        return self.c1_per_mm / self.c2_per_mm


def map_geometry(geom: ChannelGeometry,
                 cal: CalibrationConstants = DEFAULT_CALIBRATION) -> ParasiticSet:
    """Geometry to per-length parasitics. Length cancels out of every ratio."""
    return ParasiticSet(
        r_per_mm=cal.k_r / geom.width_um,
        cg_per_mm=cal.k_cg_area * geom.width_um + cal.k_cg_fringe,
        c1_per_mm=cal.k_c1 / geom.spacing_um,
        c2_per_mm=cal.k_c2 * geom.width_um,
        drv_resistance=cal.drv_resistance,
        load_cap_ff=cal.load_cap_ff,
    )


def coupling_pairs(n_wires: int, layers: int):
    """Neighbor pairs and which coupling they use.

    Two layers: (i, i+1) couple through c2 (other layer), (i, i+2) through
    c1 (same layer). One layer: only (i, i+1), through c1.
    """
    pairs = []
    if layers == 2:
        for i in range(n_wires - 1):
            pairs.append((i, i + 1, "c2"))
        for i in range(n_wires - 2):
            pairs.append((i, i + 2, "c1"))
    else:
        for i in range(n_wires - 1):
            pairs.append((i, i + 1, "c1"))
    return pairs


def _nodal_matrices(geom: ChannelGeometry, par: ParasiticSet, segments: int):
    """Assemble (G, C) of the ladder plus pad/far node index arrays.

    Node (wire, k) for k in 0..segments; k = 0 is the driver pad. All of a
    segment's capacitance is lumped at its far node.
    """
    n = geom.n_wires
    nodes_per_wire = segments + 1
    total = n * nodes_per_wire
    G = np.zeros((total, total))
    C = np.zeros((total, total))

    def idx(wire: int, k: int) -> int:
        return wire * nodes_per_wire + k

    r_seg = par.r_per_mm * geom.length_mm / segments
    cg_seg = par.cg_per_mm * geom.length_mm / segments * 1e-15
    c1_seg = par.c1_per_mm * geom.length_mm / segments * 1e-15
    c2_seg = par.c2_per_mm * geom.length_mm / segments * 1e-15
    g_drv = 1.0 / par.drv_resistance

    for w in range(n):
        G[idx(w, 0), idx(w, 0)] += g_drv
        g_seg = 1.0 / r_seg
        for k in range(segments):
            a, b = idx(w, k), idx(w, k + 1)
            G[a, a] += g_seg
            G[b, b] += g_seg
            G[a, b] -= g_seg
            G[b, a] -= g_seg
        for k in range(1, segments + 1):
            C[idx(w, k), idx(w, k)] += cg_seg
        C[idx(w, segments), idx(w, segments)] += par.load_cap_ff * 1e-15

    for i, j, kind in coupling_pairs(n, geom.layers):
        c_seg = c1_seg if kind == "c1" else c2_seg
        for k in range(1, segments + 1):
            a, b = idx(i, k), idx(j, k)
            C[a, a] += c_seg
            C[b, b] += c_seg
            C[a, b] -= c_seg
            C[b, a] -= c_seg

    pads = np.array([idx(w, 0) for w in range(n)])
    far = np.array([idx(w, segments) for w in range(n)])
    return G, C, pads, far


@dataclass(frozen=True)
class PulseResponseSet:
    """Sampled single-bit-pulse responses of the whole bus.

    resp[i, j, k] is the far-end voltage on wire j at time k*dt after a
    unit-amplitude one-symbol rectangular pulse starts on wire i. The tail
    beyond memory_span symbol periods is certified below `floor` times the
    global peak.
    """

    dt: float
    symbol_period: float
    resp: np.ndarray
    memory_span: int
    floor: float = 1e-4

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        spb = self.symbol_period / self.dt
        if abs(spb - round(spb)) > 1e-9:
            raise ValueError(
                f"symbol period {self.symbol_period} is not an integer multiple of dt {self.dt}"
            )
        if self.resp.ndim != 3 or self.resp.shape[0] != self.resp.shape[1]:
            raise ValueError(f"resp must be (n, n, samples), got {self.resp.shape}")
        self.resp.setflags(write=False)

    @property
    def n_wires(self) -> int:
        return self.resp.shape[0]

    @property
    def samples(self) -> int:
        return self.resp.shape[2]

    @property
    def samples_per_symbol(self) -> int:
        return int(round(self.symbol_period / self.dt))

    def scaled_coupling(self, alpha: float) -> "PulseResponseSet":
        """Copy with every off-diagonal response scaled by alpha."""
        resp = self.resp.copy()
        n = self.n_wires
        mask = ~np.eye(n, dtype=bool)
        resp[mask] *= alpha
        return replace(self, resp=resp)


def pulse_responses(geom: ChannelGeometry, par: ParasiticSet, dt: float,
                    symbol_period: float, segments: int = 32,
                    floor: float = 1e-4, max_span: int = 128) -> PulseResponseSet:
    """Transient single-bit-pulse responses of every wire pair.

    Drives each wire in turn through the source resistance with a 1 V pulse
    of one symbol width and integrates the ladder with the trapezoidal rule.
    The window grows (doubling) until every response has decayed below
    `floor` of the global peak; if that never happens within max_span
    symbols the truncation cannot be certified and TruncationError is
    raised.
    """
    if segments < 8:
        raise ValueError(f"segments must be >= 8, got {segments}")
    if dt > symbol_period / 32:
        raise ValueError(f"dt must be <= symbol_period/32, got dt={dt}, T={symbol_period}")
    spb = symbol_period / dt
    if abs(spb - round(spb)) > 1e-9:
        raise ValueError("symbol_period must be an integer multiple of dt")
    spb = int(round(spb))

    G, C, pads, far = _nodal_matrices(geom, par, segments)
    A = C / dt + G / 2.0
    B = C / dt - G / 2.0
    lu = scipy.linalg.lu_factor(A)
    g_drv = 1.0 / par.drv_resistance
    n = geom.n_wires

    n_spans = 8
    while True:
        steps = n_spans * spb
        resp = np.empty((n, n, steps))
        for drive in range(n):
            v = np.zeros(G.shape[0])
            b_now = np.zeros(G.shape[0])
            resp[drive, :, 0] = 0.0
            for k in range(1, steps):
                b_next = np.zeros(G.shape[0])
                # unit pulse occupies t in [0, T)
                if (k * dt) < symbol_period:
                    b_next[pads[drive]] = g_drv
                rhs = B @ v + 0.5 * (b_now + b_next)
                v = scipy.linalg.lu_solve(lu, rhs)
                b_now = b_next
                resp[drive, :, k] = v[far]
        peak = np.abs(resp).max()
        level = floor * peak
        span = None
        for s in range(n_spans, 0, -1):
            if np.abs(resp[:, :, (s - 1) * spb:]).max() <= level:
                span = s - 1
            else:
                break
        if span is not None and span < n_spans:
            return PulseResponseSet(dt=dt, symbol_period=symbol_period, resp=resp,
                                    memory_span=max(span, 1), floor=floor)
        if n_spans >= max_span:
            raise TruncationError(
                f"responses above {floor} of peak after {n_spans} symbols; extend the window"
            )
        n_spans = min(2 * n_spans, max_span)


def synth_channel(geom: ChannelGeometry, symbol_rate_gsps: float,
                  cal: CalibrationConstants = DEFAULT_CALIBRATION,
                  samples_per_symbol: int = 64, segments: int = 32,
                  floor: float = 1e-4) -> PulseResponseSet:
    """Geometry straight to pulse responses at a symbol rate in GS/s."""
    par = map_geometry(geom, cal)
    symbol_period = 1e-9 / symbol_rate_gsps
    return pulse_responses(geom, par, symbol_period / samples_per_symbol,
                           symbol_period, segments=segments, floor=floor)


def frequency_response(geom: ChannelGeometry, par: ParasiticSet, freq_hz: float,
                       segments: int = 32) -> dict:
    """Complex nodal solution at one frequency.

    il_db[i] is the far-end transfer of the driven wire i in dB (0 dB at DC
    for this capacitively loaded line); fext_db[i, j] the transfer from wire
    i's source to wire j's far end, with the diagonal holding the insertion
    values. Magnitudes are floored at -200 dB.
    """
    if freq_hz < 0:
        raise ValueError("frequency must be nonnegative")
    G, C, pads, far = _nodal_matrices(geom, par, segments)
    Y = G + 2j * math.pi * freq_hz * C
    n = geom.n_wires
    g_drv = 1.0 / par.drv_resistance
    il = np.empty(n)
    fext = np.full((n, n), FEXT_FLOOR_DB)
    for drive in range(n):
        b = np.zeros(G.shape[0], dtype=complex)
        b[pads[drive]] = g_drv
        try:
            v = np.linalg.solve(Y, b)
        except np.linalg.LinAlgError as exc:
            raise IllConditionedNetworkError(
                f"nodal system singular at {freq_hz} Hz: {exc}"
            ) from exc
        mags = np.abs(v[far])
        with np.errstate(divide="ignore"):
            db = 20.0 * np.log10(mags)
        db = np.maximum(db, FEXT_FLOOR_DB)
        il[drive] = db[drive]
        fext[drive, :] = db
    return {"il_db": il, "fext_db": fext}


def make_ideal_responses(n_wires: int, samples_per_symbol: int = 32,
                         spans: int = 4, symbol_period: float = 1e-10) -> PulseResponseSet:
    """Perfect channel: each wire reproduces its pulse, zero coupling.

    Handy oracle fixture; the eye of any decodable scheme over it is fully
    open.
    """
    dt = symbol_period / samples_per_symbol
    steps = spans * samples_per_symbol
    resp = np.zeros((n_wires, n_wires, steps))
    for i in range(n_wires):
        resp[i, i, :samples_per_symbol] = 1.0
    return PulseResponseSet(dt=dt, symbol_period=symbol_period, resp=resp, memory_span=1)


# ---------------------------------------------------------------------------
# CSV + JSON-sidecar persistence


def _sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def export_responses(prs: PulseResponseSet, path) -> None:
    """Write the response set as CSV plus a JSON metadata sidecar.

    Floats are printed with 17 significant digits so export -> import is
    bit-exact.
    """
    path = Path(path)
    n = prs.n_wires
    cols = [f"e_{i}_{j}" for i in range(n) for j in range(n)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("time_s," + ",".join(cols) + "\n")
        for k in range(prs.samples):
            t = k * prs.dt
            vals = [prs.resp[i, j, k] for i in range(n) for j in range(n)]
            fh.write(format(t, ".17g") + "," +
                     ",".join(format(v, ".17g") for v in vals) + "\n")
    meta = {
        "format_version": 1,
        "dt": prs.dt,
        "T": prs.symbol_period,
        "n": n,
        "memory_span": prs.memory_span,
        "floor": prs.floor,
    }
    with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def import_responses(path) -> PulseResponseSet:
    """Read a response set written by export_responses.

    Checks the header layout, the time grid uniformity and the declared
    dimensions before accepting the data.
    """
    path = Path(path)
    with open(_sidecar_path(path), "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    for key in ("dt", "T", "n", "memory_span"):
        if key not in meta:
            raise ValueError(f"metadata sidecar missing key {key!r}")
    n = int(meta["n"])
    dt = float(meta["dt"])
    expected = ["time_s"] + [f"e_{i}_{j}" for i in range(n) for j in range(n)]
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header != expected:
            missing = [c for c in expected if c not in header]
            extra = [c for c in header if c not in expected]
            raise ValueError(
                f"response CSV header mismatch; missing={missing}, unexpected={extra}"
            )
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if not rows:
        raise ValueError("response CSV holds no samples")
    data = np.array(rows, dtype=float)
    times = data[:, 0]
    grid = np.arange(len(times)) * dt
    if not np.allclose(times, grid, rtol=0, atol=max(dt * 1e-6, 1e-18)):
        raise ValueError("response CSV time column is not a uniform grid of dt")
    resp = data[:, 1:].T.reshape(n, n, len(times))
    return PulseResponseSet(dt=dt, symbol_period=float(meta["T"]), resp=np.ascontiguousarray(resp),
                            memory_span=int(meta["memory_span"]),
                            floor=float(meta.get("floor", 1e-4)))
