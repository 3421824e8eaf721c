"""Double machine learning for partially linear panel regression with fixed effects."""

from .dgp import DgpParams, make_plpr_data
from .dml_engine import (
    PROCEDURES,
    SCORES,
    Diagnostics,
    DmlFit,
    NuisanceFit,
    ScoreComponents,
    build_scores,
    cluster_variance,
    diagnostics,
    fit_nuisances,
    run_dml,
    solve_theta,
)
from .learners import (
    LEARNER_KINDS,
    BoostingModel,
    LassoModel,
    LearnerSpec,
    ParamGrid,
    ParamRange,
    RidgeModel,
    TreeModel,
    auto_lambda_grid,
    fit_boosting,
    fit_lasso_cv,
    fit_learner,
    fit_ridge,
    fit_tree,
    grid_points,
    tune_grid,
)
from .panel_data import (
    ColumnSpec,
    PanelDataset,
    PanelInfo,
    load_long_table,
    panel_info,
    write_long_table,
)
from .resampling import FoldAssignment, cross_fit_schedule, draw_block_folds
from .transform import (
    APPROACHES,
    DEFAULT_APPROACH,
    X_TRANSFORMS,
    TransformedTask,
    apply_approach,
    apply_covariate_transform,
    poly_feature_count,
)

__version__ = "0.1.0"

__all__ = [
    "APPROACHES",
    "DEFAULT_APPROACH",
    "LEARNER_KINDS",
    "PROCEDURES",
    "SCORES",
    "X_TRANSFORMS",
    "BoostingModel",
    "ColumnSpec",
    "DgpParams",
    "Diagnostics",
    "DmlFit",
    "FoldAssignment",
    "LassoModel",
    "LearnerSpec",
    "NuisanceFit",
    "PanelDataset",
    "PanelInfo",
    "ParamGrid",
    "ParamRange",
    "RidgeModel",
    "ScoreComponents",
    "TransformedTask",
    "TreeModel",
    "apply_approach",
    "apply_covariate_transform",
    "auto_lambda_grid",
    "build_scores",
    "cluster_variance",
    "cross_fit_schedule",
    "diagnostics",
    "draw_block_folds",
    "fit_boosting",
    "fit_lasso_cv",
    "fit_learner",
    "fit_nuisances",
    "fit_ridge",
    "fit_tree",
    "grid_points",
    "load_long_table",
    "make_plpr_data",
    "panel_info",
    "poly_feature_count",
    "run_dml",
    "solve_theta",
    "tune_grid",
    "write_long_table",
]
