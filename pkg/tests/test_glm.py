from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from streamgrowth.glm import (
    DesignMatrix,
    ModelFit,
    auc,
    coef_t_test,
    design_matrix,
    fit_least_squares,
    fit_logistic,
    gradient_check,
    predict_scores,
    welch_t_test,
)
from streamgrowth.selfcheck import auc_bruteforce


def _intercept_only(y):
    y = np.asarray(y, dtype=float)
    return DesignMatrix(columns=["intercept"], x=np.ones((len(y), 1)), y=y)


def test_intercept_only_closed_form():
    fit = fit_logistic(_intercept_only([1, 1, 1, 0]))
    assert fit.converged
    assert fit.coefficients[0] == pytest.approx(math.log(3.0), abs=1e-6)


@pytest.mark.parametrize("rate", [0.25, 0.5, 0.75])
def test_intercept_matches_logit_of_rate(rate):
    n = 32
    y = np.zeros(n)
    y[: int(rate * n)] = 1.0
    fit = fit_logistic(_intercept_only(y))
    assert fit.coefficients[0] == pytest.approx(math.log(rate / (1 - rate)), abs=1e-6)


def test_independent_feature_gets_zero_coefficient():
    rows = np.array([[1.0], [1.0], [-1.0], [-1.0]])
    design = design_matrix(["f"], rows, [1, 0, 1, 0])
    fit = fit_logistic(design)
    assert fit.converged
    assert abs(fit.coefficients[1]) < 1e-6


def test_perfect_separation_flagged():
    rows = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    design = design_matrix(["f"], rows, [0, 0, 1, 1])
    fit = fit_logistic(design)
    assert fit.separated
    assert not fit.converged


def test_log_likelihood_trace_non_decreasing():
    rng = np.random.default_rng(5)
    rows = rng.normal(size=(60, 3))
    z = rows @ np.array([0.5, -1.0, 0.2]) + 0.3
    y = (rng.random(60) < 1 / (1 + np.exp(-z))).astype(float)
    fit = fit_logistic(design_matrix(["a", "b", "c"], rows, y))
    trace = np.array(fit.ll_trace)
    assert np.all(np.diff(trace) >= -1e-12)
    assert fit.converged


def test_gradient_small_at_convergence():
    rng = np.random.default_rng(6)
    rows = rng.normal(size=(40, 2))
    y = rng.integers(0, 2, size=40)
    design = design_matrix(["a", "b"], rows, y)
    fit = fit_logistic(design, tol=1e-8)
    from streamgrowth.glm import log_likelihood_gradient

    grad = log_likelihood_gradient(design.x, design.y, fit.coefficients)
    assert np.max(np.abs(grad)) < 1e-8


def test_warm_start_preserves_monotone_trace():
    rng = np.random.default_rng(7)
    rows = rng.normal(size=(50, 2))
    y = rng.integers(0, 2, size=50)
    design = design_matrix(["a", "b"], rows, y)
    base = fit_logistic(design)
    warm = fit_logistic(design, init=base.coefficients)
    assert warm.log_likelihood >= base.log_likelihood - 1e-12


def test_label_flip_negates_coefficients():
    rng = np.random.default_rng(8)
    rows = rng.normal(size=(80, 2))
    z = rows @ np.array([1.0, -0.5]) - 0.2
    y = (rng.random(80) < 1 / (1 + np.exp(-z))).astype(float)
    design = design_matrix(["a", "b"], rows, y)
    flipped = design_matrix(["a", "b"], rows, 1.0 - y)
    fit = fit_logistic(design)
    fit_flipped = fit_logistic(flipped)
    assert np.allclose(fit_flipped.coefficients, -fit.coefficients, atol=1e-5)


def test_predict_scores():
    design = design_matrix(["f"], np.array([[0.0], [1.0], [2.0]]), [0, 1, 1])
    zero_fit = ModelFit(
        columns=["intercept", "f"],
        coefficients=np.zeros(2),
        standard_errors=np.ones(2),
        converged=True,
        separated=False,
        iterations=0,
        log_likelihood=0.0,
    )
    assert np.allclose(predict_scores(zero_fit, design), 0.5)
    slope = ModelFit(
        columns=["intercept", "f"],
        coefficients=np.array([0.0, 1.0]),
        standard_errors=np.ones(2),
        converged=True,
        separated=False,
        iterations=0,
        log_likelihood=0.0,
    )
    scores = predict_scores(slope, design)
    assert np.all(np.diff(scores) > 0)
    assert np.all((scores > 0) & (scores < 1))
    with pytest.raises(ValueError, match="columns"):
        predict_scores(slope, design_matrix(["g"], np.zeros((2, 1)), [0, 1]))


def test_design_matrix_validation():
    with pytest.raises(ValueError, match="non-finite"):
        DesignMatrix(columns=["a"], x=np.array([[np.nan]]), y=np.array([1.0]))
    with pytest.raises(ValueError, match="0/1"):
        DesignMatrix(columns=["a"], x=np.array([[1.0]]), y=np.array([2.0]))
    with pytest.raises(ValueError, match="one positive"):
        fit_logistic(_intercept_only([1, 1, 1]))


def test_auc_examples():
    assert auc([0.9, 0.8, 0.1, 0.2], [1, 1, 0, 0]) == 1.0
    assert auc([0.8, 0.3, 0.6], [1, 1, 0]) == 0.5
    assert auc([0.4, 0.4, 0.4, 0.4], [1, 0, 1, 0]) == 0.5
    with pytest.raises(ValueError):
        auc([0.5, 0.6], [1, 1])


def test_auc_matches_bruteforce_with_ties():
    rng = np.random.default_rng(9)
    for _ in range(50):
        n = int(rng.integers(2, 120))
        scores = rng.integers(0, 6, size=n) / 6.0
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        assert auc(scores, labels) == pytest.approx(
            auc_bruteforce(scores, labels), abs=1e-12
        )


@given(
    seed=st.integers(0, 10_000),
    a=st.floats(0.1, 10.0),
    b=st.floats(-5.0, 5.0),
)
@settings(max_examples=50, deadline=None)
def test_auc_invariant_under_increasing_transform(seed, a, b):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 60))
    scores = rng.normal(size=n)
    labels = rng.integers(0, 2, size=n)
    if labels.min() == labels.max():
        labels[0] = 1 - labels[0]
    transformed = a * np.exp(scores) + b
    assert auc(transformed, labels) == pytest.approx(auc(scores, labels), abs=1e-12)


def test_auc_flip_symmetry():
    rng = np.random.default_rng(10)
    scores = rng.normal(size=30)
    labels = rng.integers(0, 2, size=30)
    labels[0], labels[1] = 0, 1
    assert auc(scores, 1 - labels) == pytest.approx(1.0 - auc(scores, labels), abs=1e-12)


def test_welch_hand_derived_example():
    res = welch_t_test([2.0, 4.0, 6.0], [1.0, 2.0, 3.0])
    assert res.statistic == pytest.approx(1.549, abs=1e-3)
    assert res.df == pytest.approx(50.0 / 17.0, abs=1e-3)
    assert res.effect == pytest.approx(2.0)
    assert 0.0 < res.p_value < 1.0


def test_welch_identical_samples():
    res = welch_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert abs(res.statistic) < 1e-9
    assert res.p_value == pytest.approx(1.0, abs=1e-9)


def test_welch_effect_sign_and_errors():
    res = welch_t_test([5.0, 6.0, 7.0], [1.0, 2.0, 3.0])
    assert res.effect > 0 and res.statistic > 0
    with pytest.raises(ValueError):
        welch_t_test([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        welch_t_test([2.0, 2.0], [3.0, 3.0])


def _manual_fit(coefs, ses):
    return ModelFit(
        columns=[f"c{i}" for i in range(len(coefs))],
        coefficients=np.asarray(coefs, dtype=float),
        standard_errors=np.asarray(ses, dtype=float),
        converged=True,
        separated=False,
        iterations=1,
        log_likelihood=0.0,
    )


def test_coef_t_test_reference_points():
    p = coef_t_test(_manual_fit([0.0, 1.96, 8.0], [1.0, 1.0, 1.0]))
    assert p["c0"] == pytest.approx(1.0)
    assert p["c1"] == pytest.approx(0.05, abs=1e-3)
    assert p["c2"] < 1e-14
    with pytest.raises(ValueError, match="standard error"):
        coef_t_test(_manual_fit([1.0], [0.0]))


def test_coef_t_test_selected_columns_skips_degenerate():
    fit = _manual_fit([1.0, 2.0], [np.nan, 0.5])
    p = coef_t_test(fit, columns=["c1"])
    assert set(p) == {"c1"}


def test_gradient_check_random_instance():
    rng = np.random.default_rng(12)
    rows = rng.normal(size=(30, 4))
    y = rng.integers(0, 2, size=30)
    design = design_matrix([f"x{i}" for i in range(4)], rows, y)
    coef = rng.normal(scale=0.5, size=5)
    assert gradient_check(design, coef, h=1e-5) < 1e-6


def test_gradient_near_zero_at_mle():
    rng = np.random.default_rng(13)
    rows = rng.normal(size=(50, 2))
    y = rng.integers(0, 2, size=50)
    design = design_matrix(["a", "b"], rows, y)
    fit = fit_logistic(design)
    from streamgrowth.glm import log_likelihood_gradient

    grad = log_likelihood_gradient(design.x, design.y, fit.coefficients)
    assert np.max(np.abs(grad)) < 1e-7


def test_gradient_check_truncation_order():
    # central differences have O(h^2) truncation error: doubling h should
    # roughly quadruple the error once it dominates round-off
    rng = np.random.default_rng(14)
    rows = rng.normal(size=(40, 3))
    y = rng.integers(0, 2, size=40)
    design = design_matrix(["a", "b", "c"], rows, y)
    coef = rng.normal(size=4)
    e1 = gradient_check(design, coef, h=2e-3)
    e2 = gradient_check(design, coef, h=4e-3)
    assert 2.0 < e2 / e1 < 8.0


def test_least_squares_mode():
    rng = np.random.default_rng(15)
    rows = rng.normal(size=(40, 2))
    y = rng.integers(0, 2, size=40).astype(float)
    design = design_matrix(["a", "b"], rows, y)
    fit = fit_least_squares(design)
    expected, *_ = np.linalg.lstsq(design.x, design.y, rcond=None)
    assert np.allclose(fit.coefficients, expected)
    scores = predict_scores(fit, design)
    assert np.allclose(scores, design.x @ expected)
