"""Adaptive panel quadrature for band-limited oscillatory integrals.

Integrals of the form

    int_{m1}^{m2} exp(i (t mu^2 + c mu)) * amplitude(mu) dmu

are computed on equal panels with fixed-order Gauss-Legendre nodes.  The
initial panel count is chosen so each panel sees O(1) phase oscillations;
the panel set is then bisected wholesale until two successive refinements
agree to the requested relative tolerance.  Node and summation order are
fixed, so results are reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class NonConvergenceError(RuntimeError):
    """Panel refinement hit the panel budget before converging."""


@dataclass(frozen=True)
class QuadratureSpec:
    rtol: float = 1e-8
    max_panels: int = 2**20
    nodes_per_panel: int = 16

    def __post_init__(self):
        if not (self.rtol > 0 and self.max_panels > 0 and self.nodes_per_panel > 0):
            raise ValueError("quadrature limits must be positive")


DEFAULT_QUADRATURE = QuadratureSpec()

_CHUNK = 1024  # mu nodes processed per integrand call, bounds memory


@lru_cache(maxsize=8)
def _gauss_legendre(order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def initial_panel_count(t: float, c: float, m1: float, m2: float) -> int:
    """Panels needed for O(1) oscillations each of exp(i(t mu^2 + c mu))."""
    cycles = (abs(t) * (m2 * m2 - m1 * m1) + abs(c) * (m2 - m1)) / (2 * math.pi)
    return int(math.ceil(cycles)) + 1


def _panel_nodes(m1: float, m2: float, n_panels: int, order: int):
    ref_x, ref_w = _gauss_legendre(order)
    edges = np.linspace(m1, m2, n_panels + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    mu = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    w = (half[:, None] * ref_w[None, :]).ravel()
    return mu, w


def adaptive_oscillatory_sum(apply_nodes, m1: float, m2: float, t: float,
                             c_budget: float,
                             quad: QuadratureSpec | None = None):
    """Adaptively integrate a (possibly vector-valued) oscillatory integrand.

    ``apply_nodes(mu, w)`` must return sum_k w_k * integrand(mu_k) as a
    scalar or ndarray; it is called on node chunks and the results are
    accumulated in fixed order.  ``t`` and ``c_budget`` bound the quadratic
    and linear phase content and set the initial panel density.

    Returns (value, error_estimate) where the estimate is the difference
    between the last two refinement levels (sup-norm for vectors).
    """
    if m2 <= m1:
        raise ValueError("integration interval must satisfy m1 < m2")
    quad = quad or DEFAULT_QUADRATURE
    n_panels = min(initial_panel_count(t, c_budget, m1, m2), quad.max_panels)

    def stage(n):
        mu, w = _panel_nodes(m1, m2, n, quad.nodes_per_panel)
        total = None
        for lo in range(0, mu.size, _CHUNK):
            part = apply_nodes(mu[lo:lo + _CHUNK], w[lo:lo + _CHUNK])
            total = part if total is None else total + part
        return total

    value = stage(n_panels)
    while True:
        if 2 * n_panels > quad.max_panels:
            raise NonConvergenceError(
                f"oscillatory integral did not converge within {quad.max_panels} panels")
        n_panels *= 2
        refined = stage(n_panels)
        err = float(np.max(np.abs(refined - value)))
        scale = 1.0 + float(np.max(np.abs(refined)))
        value = refined
        if err < quad.rtol * scale:
            return value, err


def oscillatory_integral_with_error(t: float, c: float, amplitude, m1: float,
                                    m2: float,
                                    quad: QuadratureSpec | None = None):
    """int_{m1}^{m2} e^{i(t mu^2 + c mu)} amplitude(mu) dmu with error estimate.

    ``amplitude`` is a vectorized callable (or None for amplitude 1); it
    should be smooth and slowly varying — its oscillations are handled by
    the bisection but do not enter the initial panel budget.
    """
    def apply_nodes(mu, w):
        phase = np.exp(1j * (t * mu * mu + c * mu))
        values = phase if amplitude is None else phase * amplitude(mu)
        return complex(w @ values)

    return adaptive_oscillatory_sum(apply_nodes, m1, m2, t, c, quad)


def oscillatory_integral(t: float, c: float, amplitude, m1: float, m2: float,
                         quad: QuadratureSpec | None = None) -> complex:
    value, _ = oscillatory_integral_with_error(t, c, amplitude, m1, m2, quad)
    return value
