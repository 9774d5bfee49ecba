"""Preferential multi-objective Bayesian optimization toolkit.

Proposes design queries, ingests ordinal preference feedback, learns
per-objective preference surrogates, and explores the Pareto front via
dueling scalarized Thompson sampling, alongside baseline policies, exact
finite-space theory checks, and an experiment harness.
"""

from ._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
