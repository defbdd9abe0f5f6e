"""Numeric core: logistic regression by maximum likelihood, ROC-AUC, and the
two-sample / coefficient hypothesis tests.

The logistic fit is damped Newton on the Bernoulli log-likelihood with step
halving, falling back to a least-squares solve of the Newton system when the
observed information matrix is singular.  No regularization anywhere; perfect
separation is detected and flagged, never papered over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _scipy_stats

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 100
_COEF_DIVERGENCE_LIMIT = 1e4


@dataclass
class DesignMatrix:
    columns: list[str]
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 2 or self.x.shape != (len(self.y), len(self.columns)):
            raise ValueError("design shape does not match columns/outcomes")
        if not np.all(np.isfinite(self.x)):
            raise ValueError("non-finite entries in design matrix")
        if not np.all((self.y == 0) | (self.y == 1)):
            raise ValueError("outcomes must be 0/1")

    @property
    def n(self) -> int:
        return len(self.y)


def design_matrix(columns: list[str], rows: np.ndarray, y) -> DesignMatrix:
    """Prepend the constant intercept column and wrap into a DesignMatrix."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 1:
        rows = rows.reshape(-1, 1)
    x = np.hstack([np.ones((rows.shape[0], 1)), rows])
    return DesignMatrix(columns=["intercept"] + list(columns), x=x, y=np.asarray(y))


@dataclass
class ModelFit:
    columns: list[str]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    converged: bool
    separated: bool
    iterations: int
    log_likelihood: float
    ll_trace: list[float] = field(default_factory=list)
    kind: str = "logistic"


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_likelihood(x: np.ndarray, y: np.ndarray, coef: np.ndarray) -> float:
    z = x @ coef
    return float(np.sum(y * z - np.logaddexp(0.0, z)))


def log_likelihood_gradient(x: np.ndarray, y: np.ndarray, coef: np.ndarray) -> np.ndarray:
    return x.T @ (y - sigmoid(x @ coef))


def _newton_direction(x: np.ndarray, w: np.ndarray, grad: np.ndarray) -> np.ndarray:
    info = x.T @ (x * w[:, None])
    try:
        step = np.linalg.solve(info, grad)
        if np.all(np.isfinite(step)):
            return step
    except np.linalg.LinAlgError:
        pass
    # singular information: minimum-norm ascent direction
    step, *_ = np.linalg.lstsq(info, grad, rcond=None)
    if not np.all(np.isfinite(step)) or grad @ step <= 0:
        return grad  # plain gradient ascent
    return step


def fit_logistic(
    design: DesignMatrix,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    init: np.ndarray | None = None,
) -> ModelFit:
    """Maximize the Bernoulli log-likelihood; see module docstring.

    ``init`` warm-starts the coefficients (zeros by default).  The returned
    trace of log-likelihood values is non-decreasing by construction.
    """
    x, y = design.x, design.y
    n_pos = int(np.sum(y == 1))
    if n_pos == 0 or n_pos == design.n:
        raise ValueError("need at least one positive and one negative outcome")

    coef = np.zeros(x.shape[1]) if init is None else np.asarray(init, dtype=float).copy()
    ll = log_likelihood(x, y, coef)
    if not np.isfinite(ll):
        raise ValueError("non-finite log-likelihood at starting point")
    trace = [ll]
    iterations = 0

    for iterations in range(1, max_iter + 1):
        z = x @ coef
        p = sigmoid(z)
        grad = x.T @ (y - p)
        if np.max(np.abs(grad)) < tol:
            iterations -= 1
            break
        step = _newton_direction(x, p * (1.0 - p), grad)
        scale = 1.0
        accepted = False
        for _ in range(50):
            cand = coef + scale * step
            ll_new = log_likelihood(x, y, cand)
            if np.isfinite(ll_new) and ll_new >= ll - 1e-12:
                accepted = True
                break
            scale *= 0.5
        if not accepted:
            break
        coef, ll = cand, max(ll_new, ll)
        trace.append(ll)
        if np.max(np.abs(coef)) > _COEF_DIVERGENCE_LIMIT:
            break

    z = x @ coef
    grad = x.T @ (y - sigmoid(z))
    separated = bool(np.all(z != 0) and np.all((z > 0) == (y == 1)))
    converged = bool(np.max(np.abs(grad)) < tol) and not separated

    se = _standard_errors(x, sigmoid(z))
    return ModelFit(
        columns=list(design.columns),
        coefficients=coef,
        standard_errors=se,
        converged=converged,
        separated=separated,
        iterations=iterations,
        log_likelihood=ll,
        ll_trace=trace,
    )


def _standard_errors(x: np.ndarray, p: np.ndarray) -> np.ndarray:
    info = x.T @ (x * (p * (1.0 - p))[:, None])
    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(info)
    diag = np.diag(cov).copy()
    diag[diag <= 0] = np.nan
    return np.sqrt(diag)


def fit_least_squares(design: DesignMatrix) -> ModelFit:
    """Plain least-squares fit of the 0/1 outcome, for comparison runs only.

    Scores from this fit are the raw linear predictor, not probabilities.
    """
    x, y = design.x, design.y
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ coef
    dof = max(design.n - x.shape[1], 1)
    sigma2 = float(resid @ resid) / dof
    diag = np.diag(np.linalg.pinv(x.T @ x)).copy() * sigma2
    diag[diag <= 0] = np.nan
    return ModelFit(
        columns=list(design.columns),
        coefficients=coef,
        standard_errors=np.sqrt(diag),
        converged=True,
        separated=False,
        iterations=1,
        log_likelihood=float(-0.5 * (resid @ resid)),
        kind="least_squares",
    )


def predict_scores(fit: ModelFit, design: DesignMatrix) -> np.ndarray:
    if list(design.columns) != list(fit.columns):
        raise ValueError("design columns do not match fitted model")
    z = design.x @ fit.coefficients
    return z if fit.kind == "least_squares" else sigmoid(z)


def auc(scores, labels) -> float:
    """Probability of ranking a positive above a negative; ties count half.

    Computed from average ranks in O(n log n), equivalent to exhaustive pair
    counting with 0.5 credit for tied pairs.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    pos = y == 1
    n_pos = int(pos.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative label")
    order = np.argsort(s, kind="mergesort")
    ordered = s[order]
    boundaries = np.flatnonzero(np.diff(ordered)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(ordered)]))
    ranks = np.empty(len(ordered))
    ranks[order] = np.repeat((starts + ends + 1) / 2.0, ends - starts)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def coef_t_test(fit: ModelFit, columns: list[str] | None = None) -> dict[str, float]:
    """Two-sided Wald p-value per coefficient (normal reference).

    Restricts to ``columns`` when given; raises on zero or non-finite
    standard errors for any requested coefficient.
    """
    wanted = fit.columns if columns is None else columns
    out = {}
    for name in wanted:
        i = fit.columns.index(name)
        se = fit.standard_errors[i]
        if not np.isfinite(se) or se <= 0:
            raise ValueError(f"coefficient {name!r} has unusable standard error {se}")
        z = fit.coefficients[i] / se
        out[name] = math.erfc(abs(z) / math.sqrt(2.0))
    return out


@dataclass(frozen=True)
class WelchResult:
    statistic: float
    df: float
    p_value: float
    effect: float
    n_a: int
    n_b: int


def welch_t_test(sample_a, sample_b) -> WelchResult:
    """Welch two-sample t-test (unequal variances), two-sided."""
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least two values")
    va = a.var(ddof=1) / len(a)
    vb = b.var(ddof=1) / len(b)
    if va + vb == 0:
        raise ValueError("both samples have zero variance")
    effect = float(a.mean() - b.mean())
    t = effect / math.sqrt(va + vb)
    df = (va + vb) ** 2 / (va**2 / (len(a) - 1) + vb**2 / (len(b) - 1))
    p = 2.0 * float(_scipy_stats.t.sf(abs(t), df))
    return WelchResult(t, float(df), p, effect, len(a), len(b))


def gradient_check(design: DesignMatrix, coef, h: float = 1e-5) -> float:
    """Max scaled error between the analytic log-likelihood gradient and
    central finite differences with step ``h``."""
    if h <= 0:
        raise ValueError("step h must be positive")
    coef = np.asarray(coef, dtype=float)
    analytic = log_likelihood_gradient(design.x, design.y, coef)
    numeric = np.empty_like(analytic)
    for i in range(len(coef)):
        bump = np.zeros_like(coef)
        bump[i] = h
        numeric[i] = (
            log_likelihood(design.x, design.y, coef + bump)
            - log_likelihood(design.x, design.y, coef - bump)
        ) / (2.0 * h)
    scale = max(1.0, float(np.max(np.abs(numeric))))
    return float(np.max(np.abs(analytic - numeric)) / scale)
