from __future__ import annotations

# Weights below this magnitude are treated as round-off.
CLAMP_TOL = 1e-15
TOL_MASS = 1e-8
TOL_MEAN_INIT = 1e-10
TOL_FIXEDPOINT = 1e-12
RENORMALIZE_DRIFT = 1e-13
NEGATIVE_WEIGHT_TOL = 1e-8

TAIL_MASS_MAX = 1e-12
TAIL_MASS_WARN = 1e-10

# Largest |lambda * dt| on the negative real axis for which classical RK4 is stable.
RK4_STABILITY_LIMIT = 2.78

LAMBERT_MAX_ITER = 50
PHI_SERIES_RADIUS = 1e-6
PHI_C_TAIL_TOL = 1e-14

FIT_FLOOR = 1e-14
FIT_MIN_POINTS = 8
PRECISION_FLOOR = 1e-13
FENWICK_THRESHOLD = 10_000
COHERENCE_CHECK_EVERY = 100_000
