"""Shared fixtures and oracle helpers for the test suite."""

import numpy as np
import pytest

import paneldml as pm


def make_linear_panel(n_subjects=40, t_periods=5, p=3, theta=0.7, seed=0,
                      noise=1.0):
    """Panel with linear nuisances and covariate-correlated fixed effects.

    Both the outcome and treatment depend linearly on the covariates, so
    ridge with zero penalty is a correctly specified learner; a latent
    subject factor shifts covariates and both fixed effects, making the
    pooled estimator inconsistent.
    """
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n_subjects)
    alpha = 2.0 * a + rng.normal(size=n_subjects)
    gamma = a + rng.normal(size=n_subjects)
    x = a[:, None, None] + rng.normal(size=(n_subjects, t_periods, p))
    beta = np.linspace(1.0, -1.0, p)
    delta = np.linspace(0.5, -0.5, p)
    d = x @ delta + gamma[:, None] + noise * rng.normal(size=(n_subjects, t_periods))
    y = theta * d + x @ beta + alpha[:, None] + noise * rng.normal(
        size=(n_subjects, t_periods)
    )
    panel = np.repeat([str(i + 1) for i in range(n_subjects)], t_periods)
    time = np.tile(np.arange(1, t_periods + 1), n_subjects)
    return pm.PanelDataset.from_arrays(
        y.ravel(), d.ravel(), x.reshape(-1, p), panel, time
    )


def ols_coef_and_cluster_se(design, y, clusters):
    """First-column OLS coefficient and its CR0 cluster-robust se.

    Independent sandwich oracle: full design solve, score sums per
    cluster, no degrees-of-freedom correction.
    """
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    bread = np.linalg.inv(design.T @ design)
    k = design.shape[1]
    meat = np.zeros((k, k))
    for c in np.unique(clusters):
        rows = clusters == c
        s = design[rows].T @ resid[rows]
        meat += np.outer(s, s)
    vcov = bread @ meat @ bread
    return float(coef[0]), float(np.sqrt(vcov[0, 0]))


def brute_force_stump(X, y, min_leaf=1):
    """Exhaustive search over all (feature, midpoint-threshold) stumps.

    Returns (sse, feature, threshold, left_mean, right_mean) of the best
    split, scanning features then thresholds in ascending order with
    strict improvement, or None when no valid split exists.
    """
    n, p = X.shape
    best = None
    base = float(np.sum((y - y.mean()) ** 2))
    best_sse = base
    for j in range(p):
        values = np.unique(X[:, j])
        for lo, hi in zip(values[:-1], values[1:]):
            t = 0.5 * (lo + hi)
            if t >= hi:
                t = lo
            left = X[:, j] <= t
            nl, nr = int(left.sum()), int((~left).sum())
            if nl < min_leaf or nr < min_leaf:
                continue
            sse = float(np.sum((y[left] - y[left].mean()) ** 2)) + float(
                np.sum((y[~left] - y[~left].mean()) ** 2)
            )
            if sse < best_sse:
                best_sse = sse
                best = (sse, j, t, float(y[left].mean()), float(y[~left].mean()))
    return best


@pytest.fixture
def small_panel():
    return make_linear_panel(n_subjects=20, t_periods=4, p=2, seed=11)
