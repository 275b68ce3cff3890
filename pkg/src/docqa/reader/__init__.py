"""Span readers: enumeration, a lexical-overlap baseline, a trainable
feature model, and a neural model, all returning document spans."""

from .features import CONTEXT_WINDOW, FEATURE_VERSION, N_FEATURES, featurize, idf_table
from .logreg import (
    LogRegConfig,
    LogRegModel,
    fine_tune_logreg,
    load_logreg,
    logreg_answer,
    save_logreg,
    train_logreg,
)
from .neural import (
    NeuralConfig,
    NeuralReaderModel,
    analytic_gradients,
    decode_span,
    fine_tune_neural,
    gradient_check,
    load_neural,
    max_relative_error,
    neural_forward,
    neural_predict,
    numeric_gradients,
    save_neural,
    train_neural,
)
from .sliding import SlidingWindowConfig, sliding_window_answer, sliding_window_candidate
from .spans import Candidate, Span, extract_candidates, make_span

__all__ = [
    "CONTEXT_WINDOW",
    "Candidate",
    "FEATURE_VERSION",
    "LogRegConfig",
    "LogRegModel",
    "N_FEATURES",
    "NeuralConfig",
    "NeuralReaderModel",
    "SlidingWindowConfig",
    "Span",
    "analytic_gradients",
    "decode_span",
    "extract_candidates",
    "featurize",
    "fine_tune_logreg",
    "fine_tune_neural",
    "gradient_check",
    "idf_table",
    "load_logreg",
    "load_neural",
    "logreg_answer",
    "make_span",
    "max_relative_error",
    "neural_forward",
    "neural_predict",
    "numeric_gradients",
    "save_logreg",
    "save_neural",
    "sliding_window_answer",
    "sliding_window_candidate",
    "train_logreg",
    "train_neural",
]
