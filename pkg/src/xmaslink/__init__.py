"""Crosstalk-minimizing affine signaling over dense coupled interconnects.

Submodules:
  signaling  integer encode/decode matrices, certificates, baselines
  channel    geometry -> parasitics -> pulse/frequency responses
  linksim    stream simulation, patterns, behavioral supply droop
  analysis   worst-case eye, crosstalk-induced jitter, comparisons
  search     matrix search, rate bisection, edge density, co-optimization
  cli        command-line front end
"""

from .analysis import CijReport, CursorTable, EyeReport, cij, compare_schemes, cursor_table, eye
from .channel import (CalibrationConstants, ChannelGeometry, ParasiticSet, PulseResponseSet,
                      export_responses, frequency_response, import_responses,
                      make_ideal_responses, map_geometry, pulse_responses,
                      reference_geometry, synth_channel)
from .linksim import (PatternConfig, SupplyModel, Waveform, driver_current, gen_pattern,
                      simulate_stream)
from .signaling import (DecodabilityCertificate, SignalingScheme, baseline_scheme,
                        check_decodability, decode_samples, drive_level_multiset,
                        encode_symbol, l1_normalize, load_scheme, make_scheme,
                        save_scheme, toy_scheme_corrected, toy_scheme_printed)
from .search import (DesignPoint, EyeMask, SearchConfig, edge_density, enumerate_rows,
                     assemble_tx, max_symbol_rate, optimize, rank_schemes,
                     search_schemes, solve_rx)

__version__ = "0.1.0"
