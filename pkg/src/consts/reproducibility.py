from __future__ import annotations

# Base seed of the particle simulations; replicate r draws from SEED + r.
SEED = 42
