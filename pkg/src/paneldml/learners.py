"""Regression learners and grid-search tuning.

Four built-in learners cover the families used for nuisance estimation:
penalized linear (ridge, cross-validated lasso), a single CART regression
tree, and squared-error gradient boosting. All are deterministic given
their inputs; fitted models are immutable and expose ``predict``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import _tree
from .errors import DimensionMismatch, EmptyGrid, NonFiniteInput

__all__ = [
    "LEARNER_KINDS",
    "LearnerSpec",
    "ParamRange",
    "ParamGrid",
    "RidgeModel",
    "LassoModel",
    "TreeModel",
    "BoostingModel",
    "fit_ridge",
    "fit_lasso_cv",
    "fit_tree",
    "fit_boosting",
    "fit_learner",
    "auto_lambda_grid",
    "grid_points",
    "tune_grid",
]

# kind -> {param: (default, lower, upper, integer)}
_HYPERPARAMS: dict[str, dict[str, tuple[float, float, float, bool]]] = {
    "ridge": {
        "penalty": (1.0, 0.0, math.inf, False),
    },
    "lasso_cv": {
        "n_lambda": (100, 1, 1e9, True),
        "lambda_min_ratio": (1e-4, 0.0, 1.0, False),
        "cv_folds": (5, 2, 1e9, True),
    },
    "tree": {
        "max_depth": (6, 1, 1e9, True),
        "min_leaf": (5, 1, 1e9, True),
    },
    "boosting": {
        "n_rounds": (100, 1, 1e9, True),
        "learning_rate": (0.3, 0.0, 1.0, False),
        "max_depth": (6, 1, 1e9, True),
        "l2_penalty": (1.0, 0.0, math.inf, False),
    },
}

LEARNER_KINDS = tuple(_HYPERPARAMS)


@dataclass(frozen=True)
class LearnerSpec:
    """A learner kind plus a full, validated hyperparameter assignment.

    Unspecified hyperparameters take their defaults; values outside the
    declared bounds raise ``ValueError``. ``lambda_grid`` optionally pins
    the lasso penalty path; when absent the path is derived from the data
    (see :func:`auto_lambda_grid`).
    """

    kind: str
    params: dict[str, float] = field(default_factory=dict)
    lambda_grid: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in _HYPERPARAMS:
            raise ValueError(
                f"unknown learner kind {self.kind!r}; expected one of {LEARNER_KINDS}"
            )
        decl = _HYPERPARAMS[self.kind]
        merged: dict[str, float] = {}
        for name, (default, lo, hi, is_int) in decl.items():
            v = self.params.get(name, default)
            v = int(round(v)) if is_int else float(v)
            if not (lo <= v <= hi):
                raise ValueError(
                    f"{self.kind} hyperparameter {name}={v} outside [{lo}, {hi}]"
                )
            merged[name] = v
        unknown = set(self.params) - set(decl)
        if unknown:
            raise ValueError(
                f"unknown hyperparameters for {self.kind}: {sorted(unknown)}"
            )
        object.__setattr__(self, "params", merged)
        if self.lambda_grid is not None:
            if self.kind != "lasso_cv":
                raise ValueError("lambda_grid is only valid for lasso_cv")
            object.__setattr__(self, "lambda_grid", tuple(float(v) for v in self.lambda_grid))

    def with_params(self, **overrides: float) -> "LearnerSpec":
        return LearnerSpec(self.kind, {**self.params, **overrides}, self.lambda_grid)

    @classmethod
    def ridge(cls, penalty: float = 1.0) -> "LearnerSpec":
        return cls("ridge", {"penalty": penalty})

    @classmethod
    def lasso_cv(cls, n_lambda: int = 100, lambda_min_ratio: float = 1e-4,
                 cv_folds: int = 5, lambda_grid=None) -> "LearnerSpec":
        return cls(
            "lasso_cv",
            {"n_lambda": n_lambda, "lambda_min_ratio": lambda_min_ratio, "cv_folds": cv_folds},
            lambda_grid=tuple(lambda_grid) if lambda_grid is not None else None,
        )

    @classmethod
    def tree(cls, max_depth: int = 6, min_leaf: int = 5) -> "LearnerSpec":
        return cls("tree", {"max_depth": max_depth, "min_leaf": min_leaf})

    @classmethod
    def boosting(cls, n_rounds: int = 100, learning_rate: float = 0.3,
                 max_depth: int = 6, l2_penalty: float = 1.0) -> "LearnerSpec":
        return cls("boosting", {
            "n_rounds": n_rounds,
            "learning_rate": learning_rate,
            "max_depth": max_depth,
            "l2_penalty": l2_penalty,
        })


def _check_xy(X, y):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(X.shape[0], y.shape[0], "target vector")
    if X.shape[0] < 1:
        raise ValueError("need at least one observation")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NonFiniteInput("training data")
    return X, y


def _check_predict(X, n_features):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] != n_features:
        raise DimensionMismatch(n_features, X.shape[1])
    return X


@dataclass(frozen=True)
class RidgeModel:
    coef: np.ndarray
    intercept: float
    n_features: int

    def predict(self, X) -> np.ndarray:
        X = _check_predict(X, self.n_features)
        return X @ self.coef + self.intercept


def fit_ridge(X, y, penalty: float) -> RidgeModel:
    """L2-penalized least squares with an unpenalized intercept.

    ``penalty=0`` reduces to ordinary least squares, returning the
    minimum-norm coefficient vector when the design is rank deficient.
    """
    X, y = _check_xy(X, y)
    if penalty < 0:
        raise ValueError("penalty must be >= 0")
    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    Xc = X - x_mean
    yc = y - y_mean
    u, s, vt = np.linalg.svd(Xc, full_matrices=False)
    if penalty == 0:
        cutoff = max(Xc.shape) * np.finfo(np.float64).eps * (s[0] if s.size else 0.0)
        d = np.where(s > cutoff, np.divide(1.0, s, out=np.zeros_like(s), where=s > 0), 0.0)
    else:
        d = s / (s * s + penalty)
    coef = vt.T @ (d * (u.T @ yc))
    return RidgeModel(
        coef=coef, intercept=y_mean - float(x_mean @ coef), n_features=X.shape[1]
    )


@njit(cache=True, nogil=True)
def _cd_sweep(Xs, r, beta, lam, n, idx):
    delta = 0.0
    for k in range(idx.shape[0]):
        j = idx[k]
        bj = beta[j]
        rho = 0.0
        for i in range(n):
            rho += Xs[i, j] * r[i]
        rho = rho / n + bj
        if rho > lam:
            bn = rho - lam
        elif rho < -lam:
            bn = rho + lam
        else:
            bn = 0.0
        if bn != bj:
            diff = bn - bj
            for i in range(n):
                r[i] -= diff * Xs[i, j]
            beta[j] = bn
            if abs(diff) > delta:
                delta = abs(diff)
    return delta


@njit(cache=True, nogil=True)
def _lasso_cd(Xs, yc, lam, beta, max_sweeps, tol):
    """Cyclic coordinate descent on standardized columns (x_j'x_j = n).

    Full sweeps alternate with sweeps restricted to the active set; the
    solution is declared converged only when a full sweep moves no
    coefficient by tol or more.
    """
    n, p = Xs.shape
    all_idx = np.arange(p)
    r = yc.copy()
    for j in range(p):
        if beta[j] != 0.0:
            for i in range(n):
                r[i] -= Xs[i, j] * beta[j]
    sweeps = 0
    while sweeps < max_sweeps:
        delta = _cd_sweep(Xs, r, beta, lam, n, all_idx)
        sweeps += 1
        if delta < tol:
            break
        active = np.flatnonzero(beta)
        if active.shape[0] == p:
            continue
        while sweeps < max_sweeps:
            delta = _cd_sweep(Xs, r, beta, lam, n, active)
            sweeps += 1
            if delta < tol:
                break
    return beta


_LASSO_TOL = 1e-7
_LASSO_MAX_SWEEPS = 100_000


def _standardize(X):
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return np.asfortranarray((X - mu) / sd), mu, sd


@dataclass(frozen=True)
class LassoModel:
    beta: np.ndarray            # coefficients on the standardized scale
    x_mean: np.ndarray
    x_scale: np.ndarray
    y_mean: float
    lambda_selected: float
    lambda_grid: np.ndarray
    cv_mse: np.ndarray          # mean CV MSE per grid value (grid order)
    n_features: int

    def predict(self, X) -> np.ndarray:
        X = _check_predict(X, self.n_features)
        return self.y_mean + ((X - self.x_mean) / self.x_scale) @ self.beta


def auto_lambda_grid(X, y, n_lambda: int = 100, lambda_min_ratio: float = 1e-4) -> np.ndarray:
    """Geometric penalty path from the smallest all-zero lambda downward."""
    X, y = _check_xy(X, y)
    Xs, _, _ = _standardize(X)
    lam_max = float(np.max(np.abs(Xs.T @ (y - y.mean())))) / X.shape[0]
    lam_max = max(lam_max, 1e-12)
    return lam_max * np.logspace(0.0, math.log10(max(lambda_min_ratio, 1e-12)), n_lambda)


def fit_lasso_cv(X, y, lambda_grid, cv_folds: int) -> LassoModel:
    """Coordinate-descent lasso with the penalty chosen by k-fold CV.

    Columns are standardized internally for the penalty path; predictions
    come back on the original scale. The selected penalty minimizes the
    cross-validated MSE, with ties resolved toward the larger penalty.
    CV folds are contiguous row blocks, so the fit is deterministic.
    """
    X, y = _check_xy(X, y)
    grid = np.asarray(lambda_grid, dtype=np.float64).ravel()
    if grid.size == 0:
        raise EmptyGrid("lambda grid")
    if np.any(grid < 0):
        raise ValueError("lasso penalties must be >= 0")
    if cv_folds < 2:
        raise ValueError("cv_folds must be >= 2")
    n = X.shape[0]
    if cv_folds > n:
        raise ValueError(f"cv_folds={cv_folds} exceeds {n} rows")

    path = np.unique(grid)[::-1]  # descending for warm starts
    folds = np.array_split(np.arange(n), cv_folds)
    sse = np.zeros(path.size)
    for test_idx in folds:
        mask = np.ones(n, dtype=bool)
        mask[test_idx] = False
        Xtr, ytr = X[mask], y[mask]
        Xs, mu, sd = _standardize(Xtr)
        ym = float(ytr.mean())
        yc = ytr - ym
        Xte_s = (X[test_idx] - mu) / sd
        beta = np.zeros(X.shape[1])
        for i, lam in enumerate(path):
            _lasso_cd(Xs, yc, lam, beta, _LASSO_MAX_SWEEPS, _LASSO_TOL)
            resid = y[test_idx] - (ym + Xte_s @ beta)
            sse[i] += float(resid @ resid)
    cv_mse_path = sse / n

    best_i = 0
    for i in range(1, path.size):
        if cv_mse_path[i] < cv_mse_path[best_i]:
            best_i = i  # path is descending: earlier index = larger lambda
    lam_best = float(path[best_i])

    Xs, mu, sd = _standardize(X)
    ym = float(y.mean())
    yc = y - ym
    beta = np.zeros(X.shape[1])
    for lam in path[: best_i + 1]:
        _lasso_cd(Xs, yc, lam, beta, _LASSO_MAX_SWEEPS, _LASSO_TOL)

    # report CV error in the caller's grid order
    pos = {lam: i for i, lam in enumerate(path)}
    cv_mse = np.array([cv_mse_path[pos[lam]] for lam in grid])
    return LassoModel(
        beta=beta,
        x_mean=mu,
        x_scale=sd,
        y_mean=ym,
        lambda_selected=lam_best,
        lambda_grid=grid,
        cv_mse=cv_mse,
        n_features=X.shape[1],
    )


@dataclass(frozen=True)
class TreeModel:
    nodes: tuple
    n_features: int

    def predict(self, X) -> np.ndarray:
        X = _check_predict(X, self.n_features)
        return _tree.predict_tree(self.nodes, X)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.nodes[0] < 0))


def fit_tree(X, y, max_depth: int, min_leaf: int) -> TreeModel:
    """CART regression tree: greedy exact splits minimizing SSE.

    Leaves predict the mean of their training targets. Tied splits go to
    the lower feature index, then the lower threshold.
    """
    X, y = _check_xy(X, y)
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    nodes = _tree.grow_tree(X, y, max_depth, min_leaf)
    return TreeModel(nodes=nodes, n_features=X.shape[1])


@dataclass(frozen=True)
class BoostingModel:
    f0: float
    trees: tuple
    learning_rate: float
    n_features: int

    def predict(self, X) -> np.ndarray:
        X = _check_predict(X, self.n_features)
        out = np.full(X.shape[0], self.f0)
        for nodes in self.trees:
            out += self.learning_rate * _tree.predict_tree(nodes, X)
        return out


def fit_boosting(X, y, n_rounds: int, learning_rate: float,
                 max_depth: int, l2_penalty: float) -> BoostingModel:
    """Squared-error gradient boosting over depth-limited trees.

    Starts from the target mean; each round fits a tree to the current
    residuals, with leaf values sum(residuals) / (n_leaf + l2_penalty)
    shrunk by the learning rate.
    """
    X, y = _check_xy(X, y)
    if n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    if not 0.0 <= learning_rate <= 1.0:
        raise ValueError("learning_rate must be in [0, 1]")
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if l2_penalty < 0:
        raise ValueError("l2_penalty must be >= 0")
    Xc = np.ascontiguousarray(X)
    presort = np.ascontiguousarray(np.argsort(Xc, axis=0, kind="stable").T)
    f0 = float(y.mean())
    pred = np.full(X.shape[0], f0)
    trees = []
    for _ in range(n_rounds):
        nodes = _tree.grow_tree(Xc, y - pred, max_depth, 1, l2_penalty, presort)
        trees.append(nodes)
        pred += learning_rate * _tree.predict_tree(nodes, Xc)
    return BoostingModel(
        f0=f0, trees=tuple(trees), learning_rate=float(learning_rate),
        n_features=X.shape[1],
    )


def fit_learner(spec: LearnerSpec, X, y):
    """Fit a learner described by ``spec`` on (X, y)."""
    p = spec.params
    if spec.kind == "ridge":
        return fit_ridge(X, y, p["penalty"])
    if spec.kind == "lasso_cv":
        grid = spec.lambda_grid
        if grid is None:
            grid = auto_lambda_grid(X, y, p["n_lambda"], p["lambda_min_ratio"])
        return fit_lasso_cv(X, y, grid, p["cv_folds"])
    if spec.kind == "tree":
        return fit_tree(X, y, p["max_depth"], p["min_leaf"])
    return fit_boosting(
        X, y, p["n_rounds"], p["learning_rate"], p["max_depth"], p["l2_penalty"]
    )


@dataclass(frozen=True)
class ParamRange:
    """Closed interval for one tunable hyperparameter."""

    name: str
    lower: float
    upper: float
    integer: bool = False

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"{self.name}: lower bound exceeds upper bound")


@dataclass(frozen=True)
class ParamGrid:
    """Grid-search settings: per-nuisance search spaces plus budget.

    ``resolution`` equally spaced candidates are generated per
    hyperparameter; the search evaluates configurations in enumeration
    order (first declared hyperparameter cycling fastest) and stops after
    ``n_evals`` evaluations.
    """

    spaces: dict[str, tuple[ParamRange, ...]]
    resolution: int = 10
    n_evals: int = 5
    cv_folds: int = 5
    tune_on_folds: bool = False
    tune_by_subject: bool = False

    def __post_init__(self):
        if self.resolution < 1:
            raise ValueError("resolution must be >= 1")
        if self.n_evals < 1:
            raise ValueError("n_evals must be >= 1")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be >= 2")
        spaces = {k: tuple(v) for k, v in self.spaces.items()}
        for name, space in spaces.items():
            if len(space) == 0:
                raise EmptyGrid(f"search space for {name}")
        object.__setattr__(self, "spaces", spaces)


def grid_points(rng: ParamRange, resolution: int) -> np.ndarray:
    """Equally spaced candidate values; integer ranges round and dedupe."""
    pts = np.linspace(rng.lower, rng.upper, resolution)
    if rng.integer:
        pts = np.unique(np.rint(pts))
    return pts


def _enumerate_configs(space: tuple[ParamRange, ...], resolution: int) -> list[dict]:
    lists = [grid_points(r, resolution) for r in space]
    total = 1
    for pts in lists:
        total *= pts.size
    configs = []
    for i in range(total):
        t = i
        vals = {}
        for r, pts in zip(space, lists):
            vals[r.name] = float(pts[t % pts.size])
            t //= pts.size
        configs.append(vals)
    return configs


def _cv_folds(n: int, k: int, seed: int, groups=None) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    if groups is None:
        perm = rng.permutation(n)
        return [np.sort(chunk) for chunk in np.array_split(perm, k)]
    labels = np.asarray(groups)
    uniq = np.unique(labels)
    if k > uniq.size:
        raise ValueError(f"cv_folds={k} exceeds {uniq.size} groups")
    perm = rng.permutation(uniq.size)
    out = []
    for chunk in np.array_split(perm, k):
        members = np.isin(labels, uniq[chunk])
        out.append(np.flatnonzero(members))
    return out


def tune_grid(X, y, spec: LearnerSpec, space, resolution: int = 10,
              n_evals: int = 5, cv_folds: int = 5, seed: int = 0,
              groups=None) -> LearnerSpec:
    """Grid-search one learner's hyperparameters by k-fold CV MSE.

    Evaluates at most ``n_evals`` configurations in enumeration order and
    returns ``spec`` with the best-scoring values (ties keep the earliest
    configuration). Row-level CV by default; pass per-row ``groups`` to
    keep groups intact across folds.
    """
    X, y = _check_xy(X, y)
    space = tuple(space)
    if len(space) == 0:
        raise EmptyGrid("search space")
    configs = _enumerate_configs(space, resolution)[: max(1, n_evals)]
    n = X.shape[0]
    if cv_folds > n:
        raise ValueError(f"cv_folds={cv_folds} exceeds {n} rows")
    folds = _cv_folds(n, cv_folds, seed, groups)

    best_spec = None
    best_mse = math.inf
    for vals in configs:
        candidate = spec.with_params(**vals)
        sse = 0.0
        for test_idx in folds:
            mask = np.ones(n, dtype=bool)
            mask[test_idx] = False
            model = fit_learner(candidate, X[mask], y[mask])
            resid = y[test_idx] - model.predict(X[test_idx])
            sse += float(resid @ resid)
        mse = sse / n
        if mse < best_mse:
            best_mse = mse
            best_spec = candidate
    return best_spec
