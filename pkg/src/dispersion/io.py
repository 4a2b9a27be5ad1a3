"""CSV and JSON persistence of distributions and trajectories.

Floats are written in shortest round-trip form and parsed with ``float_precision="round_trip"``.
"""

from __future__ import annotations

import json
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd

from src.dispersion.meanfield import Trajectory
from src.dispersion.pmf import Pmf, make_pmf

if TYPE_CHECKING:
    from collections.abc import Sequence
    from pathlib import Path

    from src.dispersion.abm import ReplicateResult


def pmf_frame(p: Pmf) -> pd.DataFrame:
    return pd.DataFrame({"n": p.support, "p_n": p.weights})


def write_pmf_csv(p: Pmf, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    pmf_frame(p).to_csv(path, index=False)
    return path


def read_pmf_csv(path: Path) -> Pmf:
    df = pd.read_csv(path, float_precision="round_trip")
    if list(df.columns) != ["n", "p_n"]:
        msg = f"{path} must have columns n,p_n; found {list(df.columns)}"
        raise ValueError(msg)
    w = np.zeros(int(df["n"].max()) + 1)
    w[df["n"].to_numpy(dtype=np.int64)] = df["p_n"].to_numpy(dtype=np.float64)
    return make_pmf(w)


def pmf_to_json(p: Pmf) -> str:
    return json.dumps(p.to_list())


def pmf_from_json(text: str) -> Pmf:
    return make_pmf(json.loads(text))


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    columns = {"t": traj.times, "a": traj.a_series, "energy": traj.energy_series}
    columns.update({f"p{n}": traj.states[:, n] for n in range(traj.n_max + 1)})
    return pd.DataFrame(columns)


def write_trajectory_csv(traj: Trajectory, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(traj).to_csv(path, index=False)
    return path


def read_trajectory_csv(path: Path) -> Trajectory:
    """Loads a trajectory written by `write_trajectory_csv`; ``mu`` is recovered as ``a + p_1`` at ``t = 0``."""
    df = pd.read_csv(path, float_precision="round_trip")
    weight_cols = [c for c in df.columns if c.startswith("p") and c[1:].isdigit()]
    if not {"t", "a"} <= set(df.columns) or not weight_cols:
        msg = f"{path} is not a trajectory file (expected t,a,energy,p0..)"
        raise ValueError(msg)
    weight_cols.sort(key=lambda c: int(c[1:]))
    states = df[weight_cols].to_numpy(dtype=np.float64)
    mu = float(df["a"].iloc[0] + states[0, 1])
    return Trajectory.from_states(df["t"].to_numpy(dtype=np.float64), states, mu)


def ensemble_frame(results: Sequence[ReplicateResult]) -> pd.DataFrame:
    """Long table ``replicate,t,n,count`` with one row per occupied bucket and sample."""
    rows = [(r.replicate, t, n, int(c)) for r in results for t, counts in r.samples for n, c in enumerate(counts) if c]
    return pd.DataFrame(rows, columns=["replicate", "t", "n", "count"])


def write_ensemble_csv(results: Sequence[ReplicateResult], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    ensemble_frame(results).to_csv(path, index=False)
    return path
