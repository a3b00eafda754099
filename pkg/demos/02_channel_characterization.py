"""Characterize the dense coupled-wire channel.

Maps geometry to per-length parasitics, sweeps the insertion loss and
far-end crosstalk over frequency, and plots the single-bit-pulse responses
of the calibrated 8-wire reference channel. Writes PNGs next to this
script under demos/output/.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from xmaslink import channel

OUT = Path(__file__).parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    geom = channel.reference_geometry()
    par = channel.map_geometry(geom)
    print(f"geometry: S={geom.spacing_um} um, W={geom.width_um} um, "
          f"L={geom.length_mm} mm, {geom.n_wires} wires on {geom.layers} layers")
    print(f"parasitics: r={par.r_per_mm:.1f} ohm/mm  cg={par.cg_per_mm:.1f} fF/mm  "
          f"c1={par.c1_per_mm:.1f} fF/mm  c2={par.c2_per_mm:.1f} fF/mm  "
          f"(ratio {par.ratio_c1_c2:.3f})")

    freqs = np.linspace(0.1e9, 12e9, 40)
    il = []
    fext = []
    for f in freqs:
        fr = channel.frequency_response(geom, par, f)
        il.append(fr["il_db"][3])
        fext.append(fr["fext_db"][3][4])
    fr5 = channel.frequency_response(geom, par, 5e9)
    print(f"at 5 GHz: IL {fr5['il_db'][3]:.2f} dB, nearest FEXT {fr5['fext_db'][3][4]:.2f} dB")

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(freqs / 1e9, il, label="insertion (wire 3)")
    ax.plot(freqs / 1e9, fext, label="FEXT (wire 3 -> 4)")
    ax.axvline(5.0, color="gray", ls=":")
    ax.set_xlabel("frequency [GHz]")
    ax.set_ylabel("transfer [dB]")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(OUT / "channel_transfer.png", dpi=120)
    print(f"wrote {OUT / 'channel_transfer.png'}")

    prs = channel.synth_channel(geom, 10.0)
    print(f"pulse responses at 10 GS/s: {prs.samples} samples, "
          f"memory {prs.memory_span} symbols")
    t_ps = np.arange(prs.samples) * prs.dt * 1e12
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t_ps, prs.resp[3, 3], label="through (3 -> 3)")
    ax.plot(t_ps, prs.resp[3, 4], label="neighbor (3 -> 4)")
    ax.plot(t_ps, prs.resp[3, 5], label="next neighbor (3 -> 5)")
    ax.set_xlabel("time [ps]")
    ax.set_ylabel("far-end voltage per unit drive")
    ax.set_xlim(0, 600)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(OUT / "pulse_responses.png", dpi=120)
    print(f"wrote {OUT / 'pulse_responses.png'}")


if __name__ == "__main__":
    main()
