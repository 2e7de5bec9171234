"""Fairness-aware many-objective hyperparameter optimization.

Subpackages map to the pipeline stages: tabular data handling, fairness
metrics, search spaces, native learners, the NSGA-II/III engine with
hypervolume indicators, Pareto-front conflict analysis, and weighted model
selection, bound together by an experiment runner with a CLI and HTTP API.
"""

__version__ = "0.1.0"

from fairhpo._core import COMPILED, backend_name

__all__ = ["COMPILED", "backend_name", "__version__"]
