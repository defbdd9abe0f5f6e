"""Streamer popularity-growth analytics: windowed behavioral features,
rule binarization, paired baseline/behavior models, and report generation."""

from .data import (
    AccountInfo,
    Broadcast,
    Dataset,
    DatasetError,
    GamePopularityTable,
    MEASURES,
    MONTH_SECONDS,
    PLATFORMS,
    PopularitySnapshot,
    SocialPost,
    StreamerRecord,
    account_age_months,
    measure_value,
    validate_dataset,
    window_events,
)
from .features import FEATURE_NAMES, compute_features
from .binarize import CutoffTable, binarize, compute_cutoff, fit_cutoff_table, percentile
from .labels import TaskSpec, LabelSet, make_labels
from .glm import (
    DesignMatrix,
    ModelFit,
    auc,
    coef_t_test,
    design_matrix,
    fit_logistic,
    gradient_check,
    predict_scores,
    welch_t_test,
)
from .io import load_dataset, save_dataset

__version__ = "0.1.0"
