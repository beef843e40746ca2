"""Chains with infinite memory: construction, simulation and verification.

Submodules
----------
orlicz        Orlicz functions, empirical norms and the transform ``Phi~_q``.
coefficients  Lipschitz coefficient sequences with closed-form tails.
samplers      Innovation samplers.
models        The model zoo and contraction / Lipschitz checks.
simulate      Truncated chains, recursive approximation and coupled pairs.
bounds        Dependence and approximation bounds, series conditions.
dependence    Coupling estimates of ``tau(r)``.
stats         Limit-theorem diagnostics and the density bound.
cli           Config-driven experiment runner.
"""

__version__ = "0.1.0"
