"""Exception hierarchy for paneldml.

Three branches matter for the CLI exit codes: ``ConfigError`` (bad user
configuration), ``DataError`` (input data fails validation), and
``NumericalError`` (the estimation itself breaks down).
"""


class PanelDmlError(Exception):
    """Base class for all paneldml errors."""


class ConfigError(PanelDmlError):
    """Invalid configuration value or run setup."""


class DataError(PanelDmlError):
    """Input data violates a dataset invariant."""


class NumericalError(PanelDmlError):
    """Estimation failed numerically."""


class MissingColumn(DataError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"required column {name!r} not found in header")


class NonNumericCell(DataError):
    def __init__(self, row: int, column: str):
        self.row = row
        self.column = column
        super().__init__(
            f"value in column {column!r}, data row {row} is missing or not a finite number"
        )


class DuplicateKey(DataError):
    def __init__(self, panel_id: str, time_id):
        self.panel_id = panel_id
        self.time_id = time_id
        super().__init__(
            f"duplicate observation for subject {panel_id!r} at time {time_id}"
        )


class SingletonSubject(DataError):
    def __init__(self, panel_id: str):
        self.panel_id = panel_id
        super().__init__(
            f"subject {panel_id!r} has fewer than 2 observations"
        )


class ClusterSplitsSubject(DataError):
    def __init__(self, panel_id: str):
        self.panel_id = panel_id
        super().__init__(
            f"subject {panel_id!r} appears in more than one cluster"
        )


class TimeGapError(DataError):
    def __init__(self, panel_id: str, t_prev, t_next):
        self.panel_id = panel_id
        self.t_prev = t_prev
        self.t_next = t_next
        super().__init__(
            f"subject {panel_id!r} jumps from time {t_prev} to {t_next}; "
            "consecutive integer periods are required in strict-gap mode"
        )


class NonFiniteInput(DataError):
    def __init__(self, what: str = "input"):
        super().__init__(f"{what} contains NaN or infinite values")


class DimensionMismatch(PanelDmlError):
    def __init__(self, expected: int, got: int, what: str = "feature matrix"):
        super().__init__(f"{what} has {got} columns/rows, expected {expected}")


class EmptyGrid(ConfigError):
    def __init__(self, what: str = "hyperparameter grid"):
        super().__init__(f"{what} is empty")


class TooManyFolds(ConfigError):
    def __init__(self, n_folds: int, n_subjects: int):
        self.n_folds = n_folds
        self.n_subjects = n_subjects
        super().__init__(
            f"cannot split {n_subjects} subjects into {n_folds} folds"
        )


class LearnerFailure(NumericalError):
    def __init__(self, fold: int, nuisance: str, reason: str = ""):
        self.fold = fold
        self.nuisance = nuisance
        msg = f"learner for {nuisance} failed on fold {fold}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class DegenerateDesign(NumericalError):
    def __init__(self, detail: str = ""):
        msg = "moment condition is degenerate (Jacobian numerically zero)"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class SingleCluster(NumericalError):
    def __init__(self):
        super().__init__(
            "cluster-robust variance requires at least 2 clusters"
        )


class DegenerateVariance(NumericalError):
    def __init__(self):
        super().__init__("variance estimate is not positive")


class MissingResult(DataError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"result file {path!r} does not exist or is unreadable")
