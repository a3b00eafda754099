"""Co-design sweep: wires per group vs symbol rate vs edge density.

For each group size n (with n-1 data lanes), search a scheme, bisect the
highest symbol rate that satisfies the eye mask (0.7 UI, 100 mV) and the
10 dB loss ceiling, and convert to edge density with the reconstructed
accounting (group + two clock wires over two routing layers).

Fewer wires cancel crosstalk better and run faster; more wires carry more
lanes per pitch. On this channel model the trade peaks at n = 4; see the
notes in the README about how this compares with the reference design
point. Expect a few minutes of runtime.
"""

import time

from xmaslink import channel, search


def main():
    geom_base = channel.reference_geometry()
    mask = search.EyeMask(min_width_ui=0.7, min_height_v=0.1)
    print(f"eye mask: >= {mask.min_width_ui} UI, >= {mask.min_height_v * 1e3:.0f} mV; "
          f"loss <= 10 dB at Nyquist")
    print(f"{'n':>3} {'m':>3} {'B_max GS/s':>11} {'ED Tb/s/mm':>11} scheme")
    t0 = time.time()
    rows = []
    for n in (2, 3, 4, 8):
        geom = channel.ChannelGeometry(geom_base.spacing_um, geom_base.width_um,
                                       geom_base.length_mm, n, layers=2)
        prs = channel.synth_channel(geom, 10.0)
        scheme = search._scheme_for_n(n, 0.4, prs, threads=1,
                                      node_budget=4_000_000, max_candidates=64)
        if scheme is None:
            print(f"{n:>3}   -           -           - (no feasible scheme)")
            continue
        rate = search.max_symbol_rate(scheme, geom, mask, max_loss_db=10.0)
        ed = 0.0
        if rate["rate_gsps"] > 0:
            ed = search.edge_density(scheme.n_lanes, rate["rate_gsps"], n,
                                     geom.pitch_um, clock_wires=2, layers=2)
        rows.append((n, scheme.n_lanes, rate["rate_gsps"], ed, scheme.label))
        print(f"{n:>3} {scheme.n_lanes:>3} {rate['rate_gsps']:>11.2f} {ed:>11.2f} {scheme.label}")
    best = max(rows, key=lambda r: r[3])
    print(f"\nbest edge density: n={best[0]} at {best[2]:.2f} GS/s "
          f"-> {best[3]:.2f} Tb/s/mm ({best[3] / 8:.2f} TB/s/mm)   [{time.time() - t0:.0f} s]")
    print("edge-density accounting is a documented reconstruction: "
          "m*B / (ceil((n+2)/2) * pitch)")


if __name__ == "__main__":
    main()
