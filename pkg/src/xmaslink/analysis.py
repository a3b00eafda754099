"""Worst-case eye and crosstalk-induced jitter analysis.

The decoded output of an affine scheme over an LTI channel is affine in the
data bits: W_j(t) = bias_j(t) + sum over (lane, symbol) of a cursor waveform
times that bit. Peak distortion analysis signs every cursor against the
decision and is therefore *exact* for the worst case, not a bound; the
exhaustive enumerators here exist to prove that on small instances and to
serve as oracles.

Crossing-time extremes work the same way: for a rising single-bit
transition on the victim lane, the pointwise upper/lower envelopes over
aggressor sign choices are tight (every sign combination is a real data
pattern), so the first zero of the upper envelope is the earliest
achievable crossing and the last zero of the lower envelope the latest.
Supply droop breaks bit-affinity, so in PDA mode it enters as a certified
worst-case disturbance envelope instead (conservative), while the
exhaustive mode folds it in exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import PulseResponseSet
from .linksim import SupplyModel, current_extremes
from .signaling import SignalingScheme

DEFAULT_PATTERN_BUDGET = 1 << 20


class PatternBudgetError(RuntimeError):
    """Exhaustive enumeration refused; the report carries the required count."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


@dataclass(frozen=True)
class CursorTable:
    """Bit-affine decomposition of every decoded output.

    cursors[j, l] is the additive waveform that one +1 bit on lane l,
    launched at t = 0, contributes to decoded output j. projected[j, i] is
    the receive-projected response of transmit wire i onto output j (the
    building block for bias and droop bookkeeping).
    """

    scheme: SignalingScheme
    dt: float
    samples_per_symbol: int
    cursors: np.ndarray     # (m, m, L)
    projected: np.ndarray   # (m, n, L)

    def __post_init__(self):
        self.cursors.setflags(write=False)
        self.projected.setflags(write=False)

    @property
    def length(self) -> int:
        return self.cursors.shape[2]

    def reconstruct(self, data: np.ndarray) -> np.ndarray:
        """Decoded waveforms for a (m, K) +/-1 stream, from cursors alone.

        Matches linksim.simulate_stream (no supply) to float precision;
        used as the linearity oracle.
        """
        data = np.asarray(data, dtype=float)
        m, n_symbols = data.shape
        spb = self.samples_per_symbol
        out_len = (n_symbols - 1) * spb + self.length
        scheme = self.scheme
        out = np.zeros((m, out_len))
        # data-independent part: every wire biased at mid-rail
        half = 0.5 * scheme.vddq
        for k in range(n_symbols):
            seg = slice(k * spb, k * spb + self.length)
            out[:, seg] += half * self.projected.sum(axis=1)
            out[:, seg] += np.einsum("l,jlt->jt", data[:, k], self.cursors)
        out -= scheme.thresholds[:, None]
        return out


def cursor_table(scheme: SignalingScheme, prs: PulseResponseSet) -> CursorTable:
    """Project pulse responses through the receive matrix and transmit map."""
    if not scheme.cert.monomial:
        raise ValueError("cursor decomposition needs a decodable (monomial) scheme")
    if prs.n_wires != scheme.n_wires:
        raise ValueError(
            f"pulse responses are for {prs.n_wires} wires, scheme uses {scheme.n_wires}"
        )
    projected = np.einsum("jw,iwt->jit", scheme.rx.astype(float), prs.resp)
    cursors = 0.5 * scheme.vddq * np.einsum("il,jit->jlt", scheme.tx_norm, projected)
    return CursorTable(scheme=scheme, dt=prs.dt,
                       samples_per_symbol=prs.samples_per_symbol,
                       cursors=np.ascontiguousarray(cursors),
                       projected=np.ascontiguousarray(projected))


def _folded_abs(curve: np.ndarray, spb: int) -> np.ndarray:
    """Sum of |curve| over all whole-symbol shifts, per phase residue."""
    pad = (-len(curve)) % spb
    padded = np.pad(np.abs(curve), (0, pad))
    return padded.reshape(-1, spb).sum(axis=0)


def _interp_crossings(t_idx: np.ndarray, w: np.ndarray) -> list[float]:
    """All zero-crossing instants of sampled w, linearly interpolated.

    Returned in the index coordinate of t_idx. Samples exactly at zero
    count as crossing instants.
    """
    out = []
    zero = np.flatnonzero(w == 0.0)
    out.extend(t_idx[zero].tolist())
    sign_change = np.flatnonzero((w[:-1] > 0) != (w[1:] > 0))
    for i in sign_change:
        if w[i] == 0.0 or w[i + 1] == 0.0:
            continue
        frac = w[i] / (w[i] - w[i + 1])
        out.append(float(t_idx[i] + frac * (t_idx[i + 1] - t_idx[i])))
    return sorted(out)


@dataclass(frozen=True)
class OutputEye:
    output: int
    lane: int
    width_ui: float
    height_v: float
    sampling_phase_ui: float
    closed: bool
    earliest_crossing_s: float
    latest_crossing_s: float
    cij_s: float


@dataclass(frozen=True)
class EyeReport:
    """Worst-output eye metrics; heights are deterministic worst case.

    No noise statistics enter anywhere: heights and widths are exact
    worst-case values over data patterns (plus the droop disturbance bound
    in PDA mode when a supply is given).
    """

    width_ui: float
    height_v: float
    p2p_jitter_s: float
    sampling_phase_ui: float
    method: str
    closed: bool
    per_output: tuple[OutputEye, ...] = field(repr=False, default=())


@dataclass(frozen=True)
class CijReport:
    victim: int
    output: int
    earliest_s: float
    latest_s: float
    cij_s: float
    method: str
    aggressor_taps: int
    crossing_found: bool


def _eye_anchor(c_main: np.ndarray, spb: int) -> tuple[float, np.ndarray]:
    """Decision polarity and per-phase anchor sample of the main cursor.

    The eye is periodic over one UI; at phase residue r the decision
    belongs to whichever symbol's cursor copy dominates there, i.e. the
    copy index r + j*spb maximizing the signed cursor. This is what a
    persistence eye shows: early in the UI the previous symbol still owns
    the wire, late in the UI the next one does.
    """
    peak = int(np.argmax(np.abs(c_main)))
    u = 1.0 if c_main[peak] >= 0 else -1.0
    L = len(c_main)
    best = np.full(spb, -np.inf)
    anchor = np.zeros(spb, dtype=int)
    for j in range(-(-L // spb)):
        lo = j * spb
        seg = c_main[lo:lo + spb]
        vals = np.full(spb, -np.inf)
        vals[:len(seg)] = u * seg
        take = vals > best
        best[take] = vals[take]
        anchor[take] = lo + np.flatnonzero(take)
    return u, anchor


def _metrics_from_curves(worst1: np.ndarray, worst0: np.ndarray, spb: int):
    """Width/height/phase from per-phase worst decision levels.

    The eye is periodic over one UI, so the curve is treated cyclically:
    an opening that straddles the window edge is one contiguous span.
    """
    h = worst1 - worst0
    best = int(np.argmax(h))
    height = float(h[best])
    if height <= 0:
        return 0.0, 0.0, best / spb if spb else 0.0, True
    if np.all(h > 0):
        return 1.0, height, best / spb, False
    # rotate so the deepest closure sits at index 0, then the open span
    # around the best phase cannot wrap; append the wrap sample so both
    # edges interpolate
    shift = int(np.argmin(h))
    hr = np.append(np.roll(h, -shift), h[shift])
    b = (best - shift) % len(h)
    left = b
    while left > 0 and hr[left - 1] > 0:
        left -= 1
    right = b
    while hr[right + 1] > 0:
        right += 1
    left_edge = float(left)
    if left > 0:
        left_edge = left - hr[left] / (hr[left] - hr[left - 1])
    right_edge = right + hr[right] / (hr[right] - hr[right + 1])
    width_ui = min((right_edge - left_edge) / spb, 1.0)
    return width_ui, height, best / spb, False


def _droop_disturbance(table: CursorTable, supply: SupplyModel | None) -> np.ndarray:
    """Per-(output, phase) worst-case droop perturbation of the decode.

    Bound: |droop| <= L * (i_max - i_min) / T over any symbol pair, and each
    perturbed level moves by at most droop * (level / vddq) in [0, droop].
    Folding the positive/negative parts of the projected responses over all
    symbol shifts gives a certified envelope; it is exactly zero for
    constant-multiset schemes because their current never changes.
    """
    m = table.cursors.shape[0]
    spb = table.samples_per_symbol
    if supply is None or supply.inductance_h == 0.0:
        return np.zeros((m, spb))
    i_lo, i_hi = current_extremes(table.scheme, supply)
    dmax = supply.inductance_h * (i_hi - i_lo) / (spb * table.dt)
    if dmax == 0.0:
        return np.zeros((m, spb))
    out = np.empty((m, spb))
    for j in range(m):
        pos = np.maximum(table.projected[j], 0.0).sum(axis=0)
        neg = np.maximum(-table.projected[j], 0.0).sum(axis=0)
        out[j] = dmax * _folded_abs(np.maximum(pos, neg), spb)
    return out


def _pda_curves(table: CursorTable, output: int, denv_row: np.ndarray | None):
    """Exact worst-1 / worst-0 levels per phase residue for one output."""
    spb = table.samples_per_symbol
    scheme = table.scheme
    lane = scheme.cert.permutation[output]
    c_main = table.cursors[output, lane]
    u, anchor = _eye_anchor(c_main, spb)
    main_vals = c_main[anchor]
    folds = np.zeros(spb)
    for l in range(scheme.n_lanes):
        folds += _folded_abs(table.cursors[output, l], spb)
    worst1 = u * main_vals - (folds - np.abs(main_vals))
    if denv_row is not None:
        worst1 = worst1 - denv_row
    worst0 = -worst1
    return worst1, worst0, np.arange(spb), u, lane


def _sbr_timeline(table: CursorTable, output: int, victim_lane: int):
    """Fixed victim single-bit-response and free-tap bookkeeping.

    The victim lane holds -1 everywhere except one +1 symbol placed far
    enough from both ends that every cursor shift is settled. Returns the
    fixed waveform, the aggressor tap list (lane, shift sample) and the
    nominal rising-crossing window of one UI width (sample indices).
    """
    spb = table.samples_per_symbol
    L = table.length
    spans = -(-L // spb)
    kc = spans + 1
    n_symbols = 2 * spans + 3
    out_len = (n_symbols - 1) * spb + L
    c_main = table.cursors[output, victim_lane]
    fixed = np.zeros(out_len)
    for k in range(n_symbols):
        sign = 1.0 if k == kc else -1.0
        fixed[k * spb:k * spb + L] += sign * c_main
    gain = table.scheme.cert.gains[output]
    u = 1.0 if gain > 0 else -1.0
    # nominal crossing: first upward zero of the clean SBR near the pulse start
    # (scan starts one UI early; an undelayed channel crosses exactly at the
    # symbol boundary)
    w = u * fixed
    t0 = None
    for i in range(kc * spb - spb, min(kc * spb + 2 * spb + L, out_len - 1)):
        if w[i] < 0 <= w[i + 1]:
            t0 = i + w[i] / (w[i] - w[i + 1])
            break
        if w[i] == 0.0 and w[i + 1] > 0:
            t0 = float(i)
            break
    if t0 is None:
        t0 = kc * spb + spb / 2
    lo = int(round(t0 - spb / 2))
    window = np.arange(lo, lo + spb + 1)
    taps = []
    for l in range(table.scheme.n_lanes):
        if l == victim_lane:
            continue
        for k in range(n_symbols):
            start = k * spb
            if start < window[-1] and start + L > window[0]:
                taps.append((l, start))
    return fixed, u, taps, window, n_symbols


def _tap_samples(table: CursorTable, output: int, taps, window: np.ndarray) -> np.ndarray:
    """Cursor samples of each tap across the crossing window."""
    L = table.length
    S = np.zeros((len(taps), len(window)))
    for t_i, (lane, start) in enumerate(taps):
        rel = window - start
        ok = (rel >= 0) & (rel < L)
        S[t_i, ok] = table.cursors[output, lane][rel[ok]]
    return S


def cij(scheme: SignalingScheme, prs: PulseResponseSet, victim: int,
        mode: str = "envelope", budget: int = DEFAULT_PATTERN_BUDGET,
        table: CursorTable | None = None) -> CijReport:
    """Crosstalk-induced jitter of the victim lane's rising transition.

    envelope: crossing extremes from the +-sum-of-|cursor| envelopes. For a
    bit-affine decode these envelopes are pointwise achievable, so the
    extremes are tight, not just conservative bounds.
    exact: enumerate every aggressor pattern overlapping the crossing
    window and record each interpolated zero crossing; refuses with the
    required pattern count if that exceeds the budget.
    """
    if victim >= scheme.n_lanes:
        raise ValueError(f"victim lane {victim} out of range (m={scheme.n_lanes})")
    if mode not in ("exact", "envelope"):
        raise ValueError(f"mode must be 'exact' or 'envelope', got {mode!r}")
    if table is None:
        table = cursor_table(scheme, prs)
    output = scheme.output_for_lane(victim)
    fixed, u, taps, window, _ = _sbr_timeline(table, output, victim)
    S = _tap_samples(table, output, taps, window)
    wfix = u * fixed[window]
    dt = table.dt

    if mode == "envelope":
        env = np.abs(S).sum(axis=0)
        upper = wfix + env
        lower = wfix - env
        up_cross = _interp_crossings(window.astype(float), upper)
        lo_cross = _interp_crossings(window.astype(float), lower)
        found = bool(up_cross and lo_cross)
        earliest = up_cross[0] if up_cross else float(window[0])
        latest = lo_cross[-1] if lo_cross else float(window[-1])
    else:
        required = 1 << len(S)
        if required > budget:
            raise PatternBudgetError(
                f"exact crosstalk jitter needs {required} patterns, budget is {budget}",
                required=required,
            )
        earliest = np.inf
        latest = -np.inf
        found = False
        n_taps = len(S)
        chunk = 14
        for base in range(0, required, 1 << min(chunk, n_taps)):
            count = min(1 << min(chunk, n_taps), required - base)
            idxs = np.arange(base, base + count)
            signs = np.where((idxs[:, None] >> np.arange(n_taps)[None, :]) & 1, 1.0, -1.0)
            waves = wfix[None, :] + u * (signs @ S)
            for w in waves:
                crossings = _interp_crossings(window.astype(float), w)
                if crossings:
                    found = True
                    earliest = min(earliest, crossings[0])
                    latest = max(latest, crossings[-1])
        if not found:
            earliest, latest = float(window[0]), float(window[-1])
    spread = max(latest - earliest, 0.0) * dt if found else float(len(window) - 1) * dt
    return CijReport(
        victim=victim, output=output,
        earliest_s=earliest * dt, latest_s=latest * dt,
        cij_s=spread, method=mode, aggressor_taps=len(taps),
        crossing_found=found,
    )


def _exhaustive_curves(table: CursorTable, output: int, budget: int,
                       supply: SupplyModel | None):
    """Oracle worst-1 / worst-0 levels per phase by direct enumeration.

    Without droop the decode is affine in the tap bits, so patterns chunk
    into sign-matrix products. With droop the per-symbol supply sag couples
    whole words, so the enumeration walks symbol words (plus one predecessor
    word for the first current step) and rebuilds levels exactly.
    """
    scheme = table.scheme
    spb = table.samples_per_symbol
    L = table.length
    lane = scheme.cert.permutation[output]
    c_main = table.cursors[output, lane]
    u, anchor = _eye_anchor(c_main, spb)
    idx = np.arange(spb)

    # observation phases are residues r in [0, spb); the symbol launched at
    # k*spb (k <= 0) contributes its cursor sample at r - k*spb
    spans = -(-L // spb)
    m = scheme.n_lanes
    ks = [k for k in range(-spans, 1) if -k * spb < L]
    use_droop = supply is not None and supply.inductance_h > 0
    n_bits = m * len(ks) + (m if use_droop else 0)
    required = 1 << n_bits
    if required > budget:
        raise PatternBudgetError(
            f"exhaustive eye needs {required} patterns, budget is {budget}",
            required=required,
        )

    taps = [(l, k) for k in ks for l in range(m)]
    S = np.zeros((len(taps), spb))
    for t_i, (l, k) in enumerate(taps):
        rel = idx - k * spb
        ok = (rel >= 0) & (rel < L)
        S[t_i, ok] = table.cursors[output, l][rel[ok]]
    # per-phase decision tap: the main-lane cursor copy that phase anchors to
    anchor_k = -((anchor - idx) // spb)
    anchor_tap = np.array([taps.index((lane, int(k))) for k in anchor_k])

    worst1 = np.full(spb, np.inf)
    worst0 = np.full(spb, -np.inf)
    n_pat = 1 << (m * len(ks))
    chunk_bits = min(m * len(ks), 14)
    if not use_droop:
        for base in range(0, n_pat, 1 << chunk_bits):
            count = min(1 << chunk_bits, n_pat - base)
            pats = np.arange(base, base + count)
            signs = np.where((pats[:, None] >> np.arange(m * len(ks))[None, :]) & 1,
                             1.0, -1.0)
            waves = signs @ S
            for tap in np.unique(anchor_tap):
                cols = np.flatnonzero(anchor_tap == tap)
                is_one = signs[:, tap] == u
                if np.any(is_one):
                    worst1[cols] = np.minimum(worst1[cols],
                                              waves[np.ix_(is_one, cols)].min(axis=0))
                if np.any(~is_one):
                    worst0[cols] = np.maximum(worst0[cols],
                                              waves[np.ix_(~is_one, cols)].max(axis=0))
        return worst1, worst0, idx, u, lane

    # droop path: exact currents per word, one extra predecessor word
    from fractions import Fraction

    from .signaling import encode_symbol_exact

    gscale = supply.driver_conductance_s * scheme.vddq
    word_current = np.empty(1 << m)
    word_levels = np.empty((1 << m, scheme.n_wires))
    for word in range(1 << m):
        bits = [1 if (word >> b) & 1 else -1 for b in range(m)]
        word_current[word] = gscale * float(
            sum(encode_symbol_exact(scheme, bits), Fraction(0)))
        word_levels[word] = 0.5 * scheme.vddq * (scheme.tx_norm @ np.array(bits, float) + 1.0)
    proj = np.zeros((scheme.n_wires, len(ks), spb))
    for k_i, k in enumerate(ks):
        rel = idx - k * spb
        ok = (rel >= 0) & (rel < L)
        proj[:, k_i, ok] = table.projected[output][:, rel[ok]]

    symbol_period = spb * table.dt
    anchor_kidx = np.array([ks.index(int(k)) for k in anchor_k])
    want = 1 if u > 0 else 0
    for pre_word in range(1 << m):
        for pattern in range(n_pat):
            words = [(pattern >> (k_i * m)) & ((1 << m) - 1) for k_i in range(len(ks))]
            currents = word_current[words]
            prev = np.concatenate(([word_current[pre_word]], currents[:-1]))
            droop = supply.inductance_h * (currents - prev) / symbol_period
            lv = word_levels[words].T * (1.0 - droop[None, :] / scheme.vddq)
            w = np.einsum("ik,ikp->p", lv, proj) - scheme.thresholds[output]
            for k_i in np.unique(anchor_kidx):
                cols = np.flatnonzero(anchor_kidx == k_i)
                if (words[k_i] >> lane) & 1 == want:
                    worst1[cols] = np.minimum(worst1[cols], w[cols])
                else:
                    worst0[cols] = np.maximum(worst0[cols], w[cols])
    return worst1, worst0, idx, u, lane


def eye(scheme: SignalingScheme, prs: PulseResponseSet, mode: str = "pda",
        supply: SupplyModel | None = None,
        budget: int = DEFAULT_PATTERN_BUDGET) -> EyeReport:
    """Worst-case eye of every decoded output; the report keeps the worst.

    mode='pda' computes exact worst levels by signing cursors (plus a
    conservative droop disturbance when a supply with inductance is given);
    mode='exhaustive' enumerates data patterns directly and is the oracle.
    """
    if mode not in ("pda", "exhaustive"):
        raise ValueError(f"mode must be 'pda' or 'exhaustive', got {mode!r}")
    table = cursor_table(scheme, prs)
    spb = table.samples_per_symbol
    denv = _droop_disturbance(table, supply) if mode == "pda" else None
    outputs = []
    for j in range(scheme.n_lanes):
        if mode == "pda":
            worst1, worst0, idx, u, lane = _pda_curves(table, j, denv[j] if denv is not None else None)
        else:
            worst1, worst0, idx, u, lane = _exhaustive_curves(table, j, budget, supply)
        width, height, phase, closed = _metrics_from_curves(worst1, worst0, spb)
        lane_cij = cij(scheme, prs, lane,
                       mode="envelope" if mode == "pda" else "exact",
                       budget=budget, table=table)
        outputs.append(OutputEye(
            output=j, lane=lane, width_ui=width, height_v=height,
            sampling_phase_ui=phase, closed=closed,
            earliest_crossing_s=lane_cij.earliest_s,
            latest_crossing_s=lane_cij.latest_s,
            cij_s=lane_cij.cij_s,
        ))
    worst = min(outputs, key=lambda o: (o.width_ui, o.height_v))
    return EyeReport(
        width_ui=worst.width_ui,
        height_v=min(o.height_v for o in outputs),
        p2p_jitter_s=max(o.cij_s for o in outputs),
        sampling_phase_ui=worst.sampling_phase_ui,
        method=mode,
        closed=any(o.closed for o in outputs),
        per_output=tuple(outputs),
    )


def worst_lane_cij(scheme: SignalingScheme, prs: PulseResponseSet,
                   mode: str = "envelope", budget: int = DEFAULT_PATTERN_BUDGET) -> float:
    table = cursor_table(scheme, prs)
    return max(cij(scheme, prs, lane, mode=mode, budget=budget, table=table).cij_s
               for lane in range(scheme.n_lanes))


def compare_schemes(schemes, prs: PulseResponseSet, rate_gsps: float,
                    supply: SupplyModel | None = None) -> list[dict]:
    """Metric table for several schemes over one channel.

    Droop is reported as the worst-case supply sag L * max|delta i| / T for
    the given supply (zero when no supply is modeled).
    """
    rows = []
    for scheme in schemes:
        report = eye(scheme, prs, mode="pda", supply=supply)
        droop = 0.0
        if supply is not None and supply.inductance_h > 0:
            i_lo, i_hi = current_extremes(scheme, supply)
            droop = supply.inductance_h * (i_hi - i_lo) / prs.symbol_period
        rows.append({
            "label": scheme.label,
            "n_wires": scheme.n_wires,
            "n_lanes": scheme.n_lanes,
            "pin_efficiency": scheme.pin_efficiency,
            "rate_gsps": rate_gsps,
            "eye_width_ui": report.width_ui,
            "eye_height_v": report.height_v,
            "p2p_jitter_s": report.p2p_jitter_s,
            "cij_worst_s": report.p2p_jitter_s,
            "ssn_droop_v": droop,
            "eye_closed": report.closed,
        })
    return rows
