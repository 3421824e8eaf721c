"""Cross-fitted estimation of the treatment effect.

The pipeline: transform the panel, assign subjects to folds, learn the
nuisance functions out of fold, build the orthogonal score, solve the
empirical moment condition for the effect, and attach cluster-robust
inference plus RMSE diagnostics.

Two score flavors are supported. The partial-out score residualizes both
the outcome and the treatment against the learned conditional means; the
IV-type score keeps the raw treatment as the moment regressor and instead
learns the structural covariate function from a preliminary effect
estimate, which costs one extra learner fit per fold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import norm

from .errors import (
    DegenerateDesign,
    DegenerateVariance,
    LearnerFailure,
    NumericalError,
    SingleCluster,
)
from .learners import LearnerSpec, ParamGrid, fit_learner, tune_grid
from .panel_data import PanelDataset, PanelInfo, panel_info
from .resampling import draw_block_folds
from .transform import (
    APPROACHES,
    DEFAULT_APPROACH,
    X_TRANSFORMS,
    TransformedTask,
    apply_approach,
    apply_covariate_transform,
)

__all__ = [
    "SCORES",
    "PROCEDURES",
    "NuisanceFit",
    "ScoreComponents",
    "Diagnostics",
    "DmlFit",
    "fit_nuisances",
    "build_scores",
    "solve_theta",
    "cluster_variance",
    "diagnostics",
    "run_dml",
]

SCORES = ("orth-PO", "orth-IV")
PROCEDURES = ("dml1", "dml2")

_JACOBIAN_EPS = 1e-12


@dataclass
class NuisanceFit:
    """Out-of-fold nuisance predictions over the task rows.

    Rows outside every estimation sample (possible only when
    cross-fitting is off) hold NaN and are excluded downstream via
    ``covered``.
    """

    l_hat: np.ndarray
    m_hat: np.ndarray
    g_hat: np.ndarray | None
    covered: np.ndarray
    models: dict[str, list]
    specs: dict[str, tuple[LearnerSpec, ...]]
    prelim_thetas: tuple[float, ...] | None


@dataclass(frozen=True)
class ScoreComponents:
    """Per-row pieces of the orthogonal score on the covered rows.

    ``r_y`` is the outcome-side residual before subtracting the effect
    term, ``v_perp`` the orthogonalized treatment residual, and ``v_reg``
    the regressor entering the Jacobian (equal to ``v_perp`` for the
    partial-out score, the raw transformed treatment for the IV-type
    score).
    """

    rows: np.ndarray
    r_y: np.ndarray
    v_perp: np.ndarray
    v_reg: np.ndarray


@dataclass(frozen=True)
class Diagnostics:
    model_rmse: float
    rmse_l: float
    rmse_m: float
    rmse_g: float | None


def _as_spec_list(spec, n_pairs: int, name: str) -> list[LearnerSpec]:
    if isinstance(spec, LearnerSpec):
        return [spec] * n_pairs
    specs = list(spec)
    if len(specs) != n_pairs:
        raise ValueError(f"{name}: expected {n_pairs} per-fold specs, got {len(specs)}")
    return specs


def fit_nuisances(
    task: TransformedTask,
    schedule: Sequence[tuple[np.ndarray, np.ndarray]],
    ml_l,
    ml_m,
    score: str = "orth-PO",
    ml_g=None,
) -> NuisanceFit:
    """Learn the nuisance functions over a cross-fitting schedule.

    For every (train, estimate) pair, the outcome learner fits
    features -> transformed outcome and the treatment learner fits
    features -> transformed treatment on the training rows, predicting
    the estimation rows. The IV-type score additionally computes a
    preliminary effect from the partial-out closed form on the pair's
    estimation rows and fits the structural learner to
    ``y_t - d_t * theta_prelim`` on the training rows.
    """
    if score not in SCORES:
        raise ValueError(f"score must be one of {SCORES}, got {score!r}")
    if score == "orth-IV" and ml_g is None:
        raise ValueError("the IV-type score requires ml_g")
    n_pairs = len(schedule)
    specs_l = _as_spec_list(ml_l, n_pairs, "ml_l")
    specs_m = _as_spec_list(ml_m, n_pairs, "ml_m")
    specs_g = _as_spec_list(ml_g, n_pairs, "ml_g") if score == "orth-IV" else None

    n = task.n_rows
    y_t, d_t = task.y_t, task.d_t
    F_out = task.outcome_features()
    F_treat = task.treatment_features()
    l_hat = np.full(n, np.nan)
    m_hat = np.full(n, np.nan)
    g_hat = np.full(n, np.nan) if score == "orth-IV" else None
    covered = np.zeros(n, dtype=bool)
    models: dict[str, list] = {"ml_l": [], "ml_m": []}
    if score == "orth-IV":
        models["ml_g"] = []
    prelim: list[float] = []

    def _fit(spec, F, rows_tr, target, pair_no, name):
        try:
            return fit_learner(spec, F[rows_tr], target[rows_tr])
        except Exception as exc:  # surface which fold/nuisance broke
            raise LearnerFailure(pair_no, name, str(exc)) from exc

    for pair_no, (tr, es) in enumerate(schedule):
        model_l = _fit(specs_l[pair_no], F_out, tr, y_t, pair_no, "ml_l")
        model_m = _fit(specs_m[pair_no], F_treat, tr, d_t, pair_no, "ml_m")
        l_hat[es] = model_l.predict(F_out[es])
        m_hat[es] = model_m.predict(F_treat[es])
        models["ml_l"].append(model_l)
        models["ml_m"].append(model_m)
        covered[es] = True
        if score == "orth-IV":
            v = d_t[es] - m_hat[es]
            den = float(v @ v)
            if abs(den) < _JACOBIAN_EPS:
                raise DegenerateDesign(f"preliminary effect on fold {pair_no}")
            theta_pre = float(v @ (y_t[es] - l_hat[es])) / den
            prelim.append(theta_pre)
            g_target = y_t - d_t * theta_pre
            model_g = _fit(specs_g[pair_no], F_out, tr, g_target, pair_no, "ml_g")
            g_hat[es] = model_g.predict(F_out[es])
            models["ml_g"].append(model_g)

    specs = {"ml_l": tuple(specs_l), "ml_m": tuple(specs_m)}
    if score == "orth-IV":
        specs["ml_g"] = tuple(specs_g)
    return NuisanceFit(
        l_hat=l_hat,
        m_hat=m_hat,
        g_hat=g_hat,
        covered=covered,
        models=models,
        specs=specs,
        prelim_thetas=tuple(prelim) if prelim else None,
    )


def build_scores(task: TransformedTask, nf: NuisanceFit, score: str) -> ScoreComponents:
    """Assemble the per-row score pieces from the nuisance predictions."""
    if score not in SCORES:
        raise ValueError(f"score must be one of {SCORES}, got {score!r}")
    rows = np.flatnonzero(nf.covered)
    v_perp = task.d_t[rows] - nf.m_hat[rows]
    if score == "orth-PO":
        r_y = task.y_t[rows] - nf.l_hat[rows]
        v_reg = v_perp
    else:
        r_y = task.y_t[rows] - nf.g_hat[rows]
        v_reg = task.d_t[rows]
    if not (
        np.all(np.isfinite(r_y))
        and np.all(np.isfinite(v_perp))
        and np.all(np.isfinite(v_reg))
    ):
        raise NumericalError("score components contain non-finite values")
    return ScoreComponents(rows=rows, r_y=r_y, v_perp=v_perp, v_reg=v_reg)


def solve_theta(
    sc: ScoreComponents,
    schedule: Sequence[tuple[np.ndarray, np.ndarray]],
    procedure: str = "dml2",
) -> tuple[float, tuple[float, ...] | None]:
    """Solve the empirical moment condition.

    ``dml2`` pools all covered rows into one closed-form solve;
    ``dml1`` solves per estimation fold and averages. Returns
    ``(theta_hat, fold_thetas)`` with fold estimates only under dml1.
    """
    if procedure not in PROCEDURES:
        raise ValueError(f"dml_procedure must be one of {PROCEDURES}, got {procedure!r}")
    if procedure == "dml2":
        den = float(sc.v_perp @ sc.v_reg)
        if abs(den) < _JACOBIAN_EPS:
            raise DegenerateDesign()
        return float(sc.v_perp @ sc.r_y) / den, None
    fold_thetas = []
    for _, es in schedule:
        pos = np.searchsorted(sc.rows, es)
        den = float(sc.v_perp[pos] @ sc.v_reg[pos])
        if abs(den) < _JACOBIAN_EPS:
            raise DegenerateDesign(f"fold with {es.size} rows")
        fold_thetas.append(float(sc.v_perp[pos] @ sc.r_y[pos]) / den)
    return float(np.mean(fold_thetas)), tuple(fold_thetas)


def cluster_variance(sc: ScoreComponents, theta_hat: float, clusters) -> float:
    """Cluster-robust standard error of the solved effect.

    Sandwich form: score contributions are summed within each cluster
    before squaring, normalized by the squared mean Jacobian; no
    small-sample degrees-of-freedom correction is applied.
    """
    clusters = np.asarray(clusters)
    n = sc.rows.size
    if clusters.shape[0] != n:
        raise ValueError("cluster labels must align with the covered rows")
    _, inverse = np.unique(clusters, return_inverse=True)
    n_clusters = int(inverse.max()) + 1
    if n_clusters < 2:
        raise SingleCluster()
    psi = sc.v_perp * (sc.r_y - sc.v_reg * theta_hat)
    j = float(sc.v_perp @ sc.v_reg) / n
    if abs(j) < _JACOBIAN_EPS:
        raise DegenerateDesign()
    cluster_sums = np.bincount(inverse, weights=psi, minlength=n_clusters)
    meat = float(cluster_sums @ cluster_sums) / n
    if meat <= 0:
        raise DegenerateVariance()
    return math.sqrt(meat / (j * j)) / math.sqrt(n)


def diagnostics(
    task: TransformedTask, nf: NuisanceFit, sc: ScoreComponents, theta_hat: float
) -> Diagnostics:
    """Root-mean-squared errors of the nuisances and of the solved model."""
    rows = sc.rows
    rmse_l = _rms(task.y_t[rows] - nf.l_hat[rows])
    rmse_m = _rms(task.d_t[rows] - nf.m_hat[rows])
    rmse_g = _rms(task.y_t[rows] - nf.g_hat[rows]) if nf.g_hat is not None else None
    model_rmse = _rms(sc.r_y - sc.v_reg * theta_hat)
    return Diagnostics(
        model_rmse=model_rmse, rmse_l=rmse_l, rmse_m=rmse_m, rmse_g=rmse_g
    )


def _rms(v: np.ndarray) -> float:
    return float(np.sqrt(np.mean(v * v)))


def _stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    if p < 0.1:
        return "."
    return " "


def _fmt_p(p: float) -> str:
    return "<2e-16" if p < 2e-16 else f"{p:.5g}"


@dataclass(frozen=True)
class DmlFit:
    """Everything produced by one estimation run."""

    theta_hat: float
    se_theta: float
    t_stat: float
    p_value: float
    model_rmse: float
    rmse_l: float
    rmse_m: float
    rmse_g: float | None
    fold_thetas: tuple[float, ...] | None
    fold_rmse_l: tuple[float, ...]
    fold_rmse_m: tuple[float, ...]
    fold_rmse_g: tuple[float, ...] | None
    moment_residual_rel: float
    info: PanelInfo
    n_used: int
    n_clusters_used: int
    approach: str
    transform_x: str
    score: str
    dml_procedure: str
    n_folds: int
    seed: int
    apply_cross_fitting: bool
    nuisance_specs: dict[str, tuple[LearnerSpec, ...]]
    outcome: str
    treatment: str
    panel_col: str
    time_col: str
    cluster_col: str
    feature_names: tuple[str, ...]

    def ci(self, level: float = 0.95) -> tuple[float, float]:
        """Two-sided normal confidence interval at the given level."""
        if not 0.0 < level < 1.0:
            raise ValueError("level must be in (0, 1)")
        z = float(norm.ppf(0.5 + level / 2.0))
        return self.theta_hat - z * self.se_theta, self.theta_hat + z * self.se_theta

    def summary(self) -> str:
        """Human-readable fit report, rounded to 5 significant digits."""
        lines = []
        add = lines.append
        add("=================== Panel DML fit ===================")
        add("")
        add("------------------ Data summary ---------------------")
        add(f"Outcome variable: {self.outcome}")
        add(f"Treatment variable: {self.treatment}")
        add(f"Panel identifier: {self.panel_col}")
        add(f"Time identifier: {self.time_col}")
        add(f"Cluster variable: {self.cluster_col}")
        shown = ", ".join(self.feature_names[:24])
        if len(self.feature_names) > 24:
            shown += f", ... (+{len(self.feature_names) - 24} more)"
        add(f"Predictors ({len(self.feature_names)}): {shown}")
        add(f"No. observations (estimation sample): {self.n_used}")
        add(f"No. subjects: {self.info.n_subjects}")
        add(f"No. groups: {self.n_clusters_used}")
        add("")
        add("------------------ Score & algorithm ----------------")
        add(f"Score function: {self.score}")
        add(f"DML procedure: {self.dml_procedure}")
        add(f"Panel data approach: {self.approach}")
        add(f"Covariate transformation: {self.transform_x}")
        add("")
        add("------------------ Machine learners -----------------")
        for name in ("ml_l", "ml_m", "ml_g"):
            if name not in self.nuisance_specs:
                continue
            specs = self.nuisance_specs[name]
            first = specs[0]
            pieces = ", ".join(f"{k}={v:g}" for k, v in sorted(first.params.items()))
            varies = " (per-fold tuning)" if any(s != first for s in specs) else ""
            add(f"Learner {name}: {first.kind}({pieces}){varies}")
            rmse = {"ml_l": self.rmse_l, "ml_m": self.rmse_m, "ml_g": self.rmse_g}[name]
            if rmse is not None:
                add(f"RMSE of nuisance {name}: {rmse:.5g}")
        add(f"Model RMSE: {self.model_rmse:.5g}")
        add("")
        add("------------------ Resampling -----------------------")
        add(f"No. folds: {self.n_folds}")
        add(f"Apply cross-fitting: {'TRUE' if self.apply_cross_fitting else 'FALSE'}")
        add("No. repeated sample splits: 1")
        add("")
        add("------------------ Fit summary ----------------------")
        add(f"{'':>{len(self.treatment)}}  Estimate. Std. Error  t value  Pr(>|t|)")
        add(
            f"{self.treatment}  {self.theta_hat:>9.5g} {self.se_theta:>10.5g} "
            f"{self.t_stat:>8.5g}  {_fmt_p(self.p_value):>8} {_stars(self.p_value)}"
        )
        add("---")
        add("Signif. codes:  0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        """Flat JSON-ready record holding every field at full precision."""
        def spec_dict(s: LearnerSpec) -> dict:
            d = {"kind": s.kind, **s.params}
            if s.lambda_grid is not None:
                d["lambda_grid"] = list(s.lambda_grid)
            return d

        return {
            "theta_hat": self.theta_hat,
            "se_theta": self.se_theta,
            "t_stat": self.t_stat,
            "p_value": self.p_value,
            "model_rmse": self.model_rmse,
            "rmse_l": self.rmse_l,
            "rmse_m": self.rmse_m,
            "rmse_g": self.rmse_g,
            "fold_thetas": list(self.fold_thetas) if self.fold_thetas else None,
            "fold_rmse_l": list(self.fold_rmse_l),
            "fold_rmse_m": list(self.fold_rmse_m),
            "fold_rmse_g": list(self.fold_rmse_g) if self.fold_rmse_g else None,
            "moment_residual_rel": self.moment_residual_rel,
            "n_obs": self.info.n_obs,
            "n_subjects": self.info.n_subjects,
            "n_groups": self.info.n_groups,
            "n_used": self.n_used,
            "n_clusters_used": self.n_clusters_used,
            "n_features": len(self.feature_names),
            "approach": self.approach,
            "transform_x": self.transform_x,
            "score": self.score,
            "dml_procedure": self.dml_procedure,
            "n_folds": self.n_folds,
            "seed": self.seed,
            "apply_cross_fitting": self.apply_cross_fitting,
            "learners": {
                name: [spec_dict(s) for s in specs]
                for name, specs in self.nuisance_specs.items()
            },
            "outcome": self.outcome,
            "treatment": self.treatment,
            "panel_col": self.panel_col,
            "time_col": self.time_col,
            "cluster_col": self.cluster_col,
        }


def _tune_one(task, F, rows, spec, space, tuning: ParamGrid, seed, target):
    groups = task.panel_id[rows] if tuning.tune_by_subject else None
    return tune_grid(
        F[rows],
        target[rows],
        spec,
        space,
        resolution=tuning.resolution,
        n_evals=tuning.n_evals,
        cv_folds=tuning.cv_folds,
        seed=seed,
        groups=groups,
    )


def _resolve_specs(task, schedule, base: dict, tuning: ParamGrid | None, seed: int):
    per_pair = {name: [sp] * len(schedule) for name, sp in base.items()}
    if tuning is None:
        return per_pair
    all_rows = np.arange(task.n_rows)
    F_out = task.outcome_features()
    F_treat = task.treatment_features()
    setups = {"ml_l": (F_out, task.y_t), "ml_m": (F_treat, task.d_t)}
    for name in ("ml_l", "ml_m"):
        if name not in base or name not in tuning.spaces:
            continue
        F, target = setups[name]
        space = tuning.spaces[name]
        if tuning.tune_on_folds:
            per_pair[name] = [
                _tune_one(task, F, tr, base[name], space, tuning, seed + 1, target)
                for tr, _ in schedule
            ]
        else:
            tuned = _tune_one(task, F, all_rows, base[name], space, tuning, seed + 1, target)
            per_pair[name] = [tuned] * len(schedule)
    if "ml_g" in base and "ml_g" in tuning.spaces:
        # the structural target needs a preliminary effect: partial-out
        # closed form from single in-sample fits of the resolved l/m specs
        l_hat = fit_learner(per_pair["ml_l"][0], F_out, task.y_t).predict(F_out)
        m_hat = fit_learner(per_pair["ml_m"][0], F_treat, task.d_t).predict(F_treat)
        v = task.d_t - m_hat
        den = float(v @ v)
        if abs(den) < _JACOBIAN_EPS:
            raise DegenerateDesign("preliminary effect for ml_g tuning")
        theta_pre = float(v @ (task.y_t - l_hat)) / den
        g_target = task.y_t - task.d_t * theta_pre
        space = tuning.spaces["ml_g"]
        if tuning.tune_on_folds:
            per_pair["ml_g"] = [
                _tune_one(task, F_out, tr, base["ml_g"], space, tuning, seed + 1, g_target)
                for tr, _ in schedule
            ]
        else:
            tuned = _tune_one(task, F_out, all_rows, base["ml_g"], space, tuning, seed + 1, g_target)
            per_pair["ml_g"] = [tuned] * len(schedule)
    return per_pair


def run_dml(
    data: PanelDataset,
    approach: str = DEFAULT_APPROACH,
    transform_x: str = "no",
    score: str = "orth-PO",
    dml_procedure: str = "dml2",
    ml_l: LearnerSpec | None = None,
    ml_m: LearnerSpec | None = None,
    ml_g: LearnerSpec | None = None,
    n_folds: int = 5,
    seed: int = 0,
    apply_cross_fitting: bool = True,
    tuning: ParamGrid | None = None,
    strict_gaps: bool = False,
) -> DmlFit:
    """End-to-end estimation of the treatment effect on one panel.

    Parameters
    ----------
    data : PanelDataset
        Validated long-format panel.
    approach : str
        Panel data approach, one of ``("fd-exact", "wg-approx", "cre",
        "pooled")``.
    transform_x : str
        Covariate pre-processing, one of ``("no", "poly", "minmax")``,
        applied after the approach.
    score : str
        ``"orth-PO"`` (default) or ``"orth-IV"``; the latter requires
        ``ml_g``.
    dml_procedure : str
        ``"dml2"`` (pooled solve, default) or ``"dml1"`` (per-fold solve,
        averaged).
    ml_l, ml_m, ml_g : LearnerSpec
        Learners for the outcome, treatment, and (IV-type only)
        structural nuisances. Default to boosting when omitted.
    n_folds : int
        Block-k-fold count. ``n_folds=1`` with
        ``apply_cross_fitting=False`` skips splitting entirely and fits
        in sample.
    seed : int
        Drives the fold draw and tuning CV; identical inputs and seed
        reproduce the fit exactly.
    apply_cross_fitting : bool
        When False with ``n_folds >= 2``, only the first fold serves as
        the estimation sample (flagged in the output).
    tuning : ParamGrid, optional
        Grid-search settings; only nuisances with a search space entry
        are tuned.
    strict_gaps : bool
        Forwarded to the first-difference transform.

    Returns
    -------
    DmlFit
    """
    if approach not in APPROACHES:
        raise ValueError(f"approach must be one of {APPROACHES}, got {approach!r}")
    if transform_x not in X_TRANSFORMS:
        raise ValueError(f"transform_x must be one of {X_TRANSFORMS}, got {transform_x!r}")
    if score not in SCORES:
        raise ValueError(f"score must be one of {SCORES}, got {score!r}")
    if dml_procedure not in PROCEDURES:
        raise ValueError(f"dml_procedure must be one of {PROCEDURES}, got {dml_procedure!r}")
    if n_folds < 1:
        raise ValueError("n_folds must be >= 1")
    if n_folds == 1 and apply_cross_fitting:
        raise ValueError("n_folds=1 requires apply_cross_fitting=False")

    ml_l = ml_l if ml_l is not None else LearnerSpec.boosting()
    ml_m = ml_m if ml_m is not None else LearnerSpec.boosting()
    if score == "orth-IV" and ml_g is None:
        raise ValueError("the IV-type score requires ml_g")

    task = apply_approach(data, approach, strict_gaps=strict_gaps)
    task = apply_covariate_transform(task, transform_x)

    if n_folds == 1:
        all_rows = np.arange(task.n_rows)
        schedule = [(all_rows, all_rows)]
    else:
        fa = draw_block_folds(data, n_folds, seed)
        task_fold = fa.row_fold[task.row_map]
        schedule = []
        for j in range(n_folds if apply_cross_fitting else 1):
            est = np.flatnonzero(task_fold == j)
            train = np.flatnonzero(task_fold != j)
            if est.size == 0 or train.size == 0:
                raise DegenerateDesign(f"fold {j} has no usable rows")
            schedule.append((train, est))

    base = {"ml_l": ml_l, "ml_m": ml_m}
    if score == "orth-IV":
        base["ml_g"] = ml_g
    per_pair = _resolve_specs(task, schedule, base, tuning, seed)

    nf = fit_nuisances(
        task,
        schedule,
        per_pair["ml_l"],
        per_pair["ml_m"],
        score=score,
        ml_g=per_pair.get("ml_g"),
    )
    sc = build_scores(task, nf, score)
    theta_hat, fold_thetas = solve_theta(sc, schedule, dml_procedure)
    clusters = task.cluster_id[sc.rows]
    se = cluster_variance(sc, theta_hat, clusters)
    diag = diagnostics(task, nf, sc, theta_hat)

    psi = sc.v_perp * (sc.r_y - sc.v_reg * theta_hat)
    denom = float(np.sum(np.abs(sc.v_perp * sc.v_reg)))
    moment_rel = abs(float(psi.sum())) / denom if denom > 0 else math.inf

    fold_rmse_l, fold_rmse_m, fold_rmse_g = [], [], []
    for _, es in schedule:
        fold_rmse_l.append(_rms(task.y_t[es] - nf.l_hat[es]))
        fold_rmse_m.append(_rms(task.d_t[es] - nf.m_hat[es]))
        if nf.g_hat is not None:
            fold_rmse_g.append(_rms(task.y_t[es] - nf.g_hat[es]))

    t_stat = theta_hat / se
    p_value = 2.0 * float(norm.sf(abs(t_stat)))
    names = data.names
    return DmlFit(
        theta_hat=theta_hat,
        se_theta=se,
        t_stat=t_stat,
        p_value=p_value,
        model_rmse=diag.model_rmse,
        rmse_l=diag.rmse_l,
        rmse_m=diag.rmse_m,
        rmse_g=diag.rmse_g,
        fold_thetas=fold_thetas,
        fold_rmse_l=tuple(fold_rmse_l),
        fold_rmse_m=tuple(fold_rmse_m),
        fold_rmse_g=tuple(fold_rmse_g) if fold_rmse_g else None,
        moment_residual_rel=moment_rel,
        info=panel_info(data),
        n_used=int(sc.rows.size),
        n_clusters_used=int(np.unique(clusters).size),
        approach=approach,
        transform_x=transform_x,
        score=score,
        dml_procedure=dml_procedure,
        n_folds=n_folds,
        seed=seed,
        apply_cross_fitting=apply_cross_fitting,
        nuisance_specs=nf.specs,
        outcome=names.y,
        treatment=names.d,
        panel_col=names.panel,
        time_col=names.time,
        cluster_col=names.cluster if names.cluster is not None else names.panel,
        feature_names=task.feature_names,
    )
