"""Emotion-intensity regression from wearable physiological signals.

Subpackages cover the pipeline end to end: ingestion of sensor/label file
exports, preprocessing, nine from-scratch regression models, a
leave-one-subject-out evaluation harness, dataset diagnostics, and a
deterministic synthetic session generator. Submodules import NumPy; this
top-level module stays import-light on purpose.
"""

__version__ = "0.1.0"
