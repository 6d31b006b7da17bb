"""Nine from-scratch regression families behind one fit/predict contract."""

from .base import (
    DEFAULT_PARAMS,
    DISPLAY_NAMES,
    FAMILIES,
    REPORT_ORDER,
    ModelConfig,
    TrainedModel,
    default_configs,
    fit,
    make_config,
    predict,
)
from .network import AdamState, FeedForwardNet, adam_update, network_gradients
from .serialize import load_model, save_model
from .tree import SplitCandidate, cart_best_split

__all__ = [
    "DEFAULT_PARAMS",
    "DISPLAY_NAMES",
    "FAMILIES",
    "REPORT_ORDER",
    "AdamState",
    "FeedForwardNet",
    "ModelConfig",
    "SplitCandidate",
    "TrainedModel",
    "adam_update",
    "cart_best_split",
    "default_configs",
    "fit",
    "load_model",
    "make_config",
    "network_gradients",
    "predict",
    "save_model",
]
