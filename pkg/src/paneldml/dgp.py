"""Synthetic panel generator for demos, tests and Monte Carlo runs.

The design has a subject effect correlated with the covariates: a latent
Gaussian factor shifts both the subject's covariate levels and (through
``rho``) the outcome fixed effect, while an independent subject effect
drives the treatment. Both nuisance functions are nonlinear with an
interaction term, so linear learners are deliberately misspecified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .panel_data import ColumnSpec, PanelDataset

__all__ = ["DgpParams", "make_plpr_data"]


@dataclass(frozen=True)
class DgpParams:
    """Parameters of the panel DGP.

    ``n_obs`` is the number of cross-sectional subjects (each observed
    ``t_per`` times), ``dim_x`` the covariate count, ``theta`` the true
    treatment effect, and ``rho`` the correlation knob between the
    latent factor and the outcome fixed effect.
    """

    n_obs: int = 1000
    t_per: int = 10
    dim_x: int = 20
    theta: float = 0.5
    rho: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.n_obs < 1:
            raise ValueError("n_obs must be >= 1")
        if self.t_per < 2:
            raise ValueError("t_per must be >= 2")
        if self.dim_x < 3:
            raise ValueError("dim_x must be >= 3 (nuisances reference X1 and X3)")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must be in [0, 1]")


def _draw_components(params: DgpParams) -> dict[str, np.ndarray]:
    n, t, p = params.n_obs, params.t_per, params.dim_x
    rng = np.random.default_rng(params.seed)
    a = 3.0 + math.sqrt(3.0) * rng.standard_normal(n)
    b = rng.standard_normal(n)
    gamma = math.sqrt(5.0) * rng.standard_normal(n)
    x = a[:, None, None] + math.sqrt(5.0) * rng.standard_normal((n, t, p))
    v = rng.standard_normal((n, t))
    u = rng.standard_normal((n, t))
    alpha = params.rho * a + math.sqrt(1.0 - params.rho**2) * b
    x1 = x[:, :, 0]
    x3 = x[:, :, 2]
    m0 = 0.25 * x1 * (x1 > 0) + 0.5 * x1 * x3
    g0 = 0.5 * x1 * x3 + 0.25 * x3 * (x3 > 0)
    d = m0 + gamma[:, None] + v
    y = d * params.theta + g0 + alpha[:, None] + u
    return {
        "a": a, "b": b, "gamma": gamma, "alpha": alpha,
        "x": x, "u": u, "v": v, "m0": m0, "g0": g0, "d": d, "y": y,
    }


def make_plpr_data(params: DgpParams) -> PanelDataset:
    """Generate a long-format panel from the DGP; deterministic per seed."""
    c = _draw_components(params)
    n, t, p = params.n_obs, params.t_per, params.dim_x
    panel = np.repeat([str(i + 1) for i in range(n)], t)
    time = np.tile(np.arange(1, t + 1, dtype=np.float64), n)
    names = ColumnSpec(
        y="y", d="d", x=tuple(f"X{j + 1}" for j in range(p)),
        panel="id", time="time", cluster=None,
    )
    return PanelDataset.from_arrays(
        y=c["y"].reshape(-1),
        d=c["d"].reshape(-1),
        x=c["x"].reshape(n * t, p),
        panel_id=panel,
        time_id=time,
        names=names,
    )
