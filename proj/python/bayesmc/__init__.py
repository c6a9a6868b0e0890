# Apache License, Version 2.0, refer to LICENSE.txt
"""Bayesian inference engine: conjugate analysis, Metropolis/HMC sampling,
Gibbs samplers for hierarchical linear models, chain diagnostics, and
model-evaluation scores."""

from bayesmc._core import *  # noqa: F401,F403
from bayesmc._core import __version__  # noqa: F401
