from __future__ import annotations

N_SITES = 1000
DT = 0.01
N_MAX = 100
T_END = 10.0
RECORD_EVERY = 1
FIT_WINDOW_START = 2.0
