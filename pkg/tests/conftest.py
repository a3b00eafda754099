import numpy as np
import pytest

from xmaslink import channel as chan
from xmaslink import search
from xmaslink import signaling as sig


@pytest.fixture(scope="session")
def reference_prs_10g():
    return chan.synth_channel(chan.reference_geometry(), 10.0)


@pytest.fixture(scope="session")
def reference_prs_5g():
    return chan.synth_channel(chan.reference_geometry(), 5.0)


@pytest.fixture(scope="session")
def searched_scheme_n8(reference_prs_10g):
    """Best searched 8-wire / 7-lane scheme on the reference channel.

    One search per session; several acceptance criteria share it.
    """
    cfg = search.SearchConfig(n_wires=8, level_family=search.NINTHS_FAMILY,
                              node_budget=4_000_000, max_candidates=64)
    res = search.search_schemes(cfg, reference_prs_10g, threads=1)
    assert res["ranked"], "reference search found no scheme"
    return res["ranked"][0].scheme


def make_random_prs(rng, n_wires, spb=16, spans=4, symbol_period=1e-10):
    """Smooth random decaying responses, memory <= spans - 1 symbols."""
    length = spans * spb
    t = np.arange(length, dtype=float)
    resp = np.zeros((n_wires, n_wires, length))
    for i in range(n_wires):
        for j in range(n_wires):
            tau = rng.uniform(2.0, 6.0)
            if i == j:
                amp = rng.uniform(0.6, 0.9)
            else:
                amp = rng.uniform(0.02, 0.12) * rng.choice([-1.0, 1.0])
            rise = np.exp(-np.maximum(t - 2, 0) / (2 * tau))
            fall = np.exp(-np.maximum(t - 2, 0) / tau)
            resp[i, j] = amp * (rise - fall)
    return chan.PulseResponseSet(dt=symbol_period / spb, symbol_period=symbol_period,
                                 resp=resp, memory_span=spans - 1)


def small_scheme_for(n_wires, vddq=0.4):
    """A decodable scheme matching a small wire count (oracle tests)."""
    if n_wires == 2:
        return sig.baseline_scheme("se", 2, vddq)
    if n_wires == 3:
        return sig.toy_scheme_corrected(vddq)
    if n_wires == 4:
        return sig.baseline_scheme("differential", 4, vddq)
    raise ValueError(f"no small scheme for {n_wires} wires")
