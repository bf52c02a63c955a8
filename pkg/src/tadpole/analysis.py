"""Experiment drivers: decay scans, perturbation bounds, scaling, cycles.

These routines quantify the dispersive behaviour of the band-filtered
tadpole dynamics: the t^(-1/2) sup-norm decay and its independence of the
head circumference, the van der Corput envelope for the oscillatory
integrals, the shrinking-head comparison against the Neumann half-line,
and the geometric cycle expansion of the difference kernel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import (GraphFunction, GridSpec, SpectralBand, TadpoleGeometry,
                    norms, queue_truncation_length)
from .propagator import evolve, evolve_difference_queue, evolve_neumann_halfline
from .quadrature import QuadratureSpec
from .resolvent import CoefficientMode, kernel_difference
from .spectral import project_ac

A_EFF_FLOOR = 1e-6  # substitute for a = 0 on the tadpole side


# ---------------------------------------------------------------------------
# initial-condition catalog

def _bump_profile(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


def _bump_moments() -> tuple[float, float]:
    # int_{-1}^{1} of the unit bump and of its square, dense Gauss-Legendre
    nodes, weights = np.polynomial.legendre.leggauss(200)
    vals = _bump_profile(nodes)
    return float(weights @ vals), float(weights @ vals**2)


_BUMP_L1, _BUMP_L2SQ = _bump_moments()


@dataclass(frozen=True)
class InitialCondition:
    """Catalog entry for queue-supported initial data.

    gaussian(c, s): exp(-(x-c)^2 / (2 s^2)),  L1 = s sqrt(2 pi)
    bump(c, r):     exp(1 - 1/(1 - ((x-c)/r)^2)) on |x-c| < r
    """

    name: str
    params: tuple[float, ...]

    def profile(self, x: np.ndarray) -> np.ndarray:
        if self.name == "gaussian":
            c, s = self.params
            return np.exp(-((x - c) ** 2) / (2 * s * s))
        c, r = self.params
        return _bump_profile((x - c) / r)

    def sample(self, geometry: TadpoleGeometry, grid: GridSpec) -> GraphFunction:
        return GraphFunction.from_callables(geometry, grid, self.profile, None)

    @property
    def l1(self) -> float:
        if self.name == "gaussian":
            return self.params[1] * math.sqrt(2 * math.pi)
        return self.params[1] * _BUMP_L1

    @property
    def l2(self) -> float:
        if self.name == "gaussian":
            return math.sqrt(self.params[1] * math.sqrt(math.pi))
        return math.sqrt(self.params[1] * _BUMP_L2SQ)

    @property
    def support_extent(self) -> float:
        c = self.params[0]
        if self.name == "gaussian":
            return c + 8 * self.params[1]
        return c + self.params[1]


def make_initial_condition(name: str, params) -> InitialCondition:
    params = tuple(float(p) for p in params)
    if name == "gaussian":
        if len(params) != 2 or params[1] <= 0:
            raise ValueError("gaussian needs (center, width > 0)")
    elif name == "bump":
        if len(params) != 2 or params[1] <= 0:
            raise ValueError("bump needs (center, radius > 0)")
        if params[0] - params[1] < 0:
            raise ValueError("bump must sit inside the queue")
    else:
        raise ValueError(f"unknown initial condition {name!r}")
    return InitialCondition(name, params)


def default_grid_for(ic: InitialCondition, band: SpectralBand, t_max: float,
                     queue_resolution: float = 0.1,
                     n_head: int = 201) -> GridSpec:
    """Grid satisfying the queue truncation rule at the given resolution."""
    x_max = queue_truncation_length(ic.support_extent, band.b, t_max)
    n_queue = int(math.ceil(x_max / queue_resolution)) + 1
    return GridSpec(x_max, n_queue, n_head)


# ---------------------------------------------------------------------------
# dispersive decay

@dataclass
class DecayScanResult:
    """Rows (t, sup_norm, sqrt(t)*sup_norm) plus a log-log fit over t >= 1."""

    rows: list[tuple[float, float, float]]
    fitted_exponent: float
    fitted_constant: float   # empirical C: max of the scaled column
    fit_residual: float      # rms residual of the log-log fit

    @property
    def scaled_spread(self) -> float:
        scaled = [r[2] for r in self.rows]
        return max(scaled) / min(scaled)


def decay_scan(u0: GraphFunction, band: SpectralBand, times,
               quad: QuadratureSpec | None = None,
               mode: CoefficientMode = CoefficientMode.CORRECTED,
               k_max: int | None = None) -> DecayScanResult:
    """Sup-norm decay of the band-filtered evolution of the ac part of u0."""
    times = sorted(float(t) for t in times)
    if any(t <= 0 for t in times):
        raise ValueError("decay scan times must be positive")
    f = project_ac(u0)
    rows = []
    for t in times:
        u = evolve(f, band, t, quad, mode, k_max)
        sup = norms(u)[2]
        rows.append((t, sup, math.sqrt(t) * sup))
    fit_rows = [(t, s) for t, s, _ in rows if t >= 1]
    log_t = np.log([r[0] for r in fit_rows])
    log_s = np.log([r[1] for r in fit_rows])
    slope, intercept = np.polyfit(log_t, log_s, 1)
    resid = log_s - (slope * log_t + intercept)
    return DecayScanResult(rows=rows,
                           fitted_exponent=float(slope),
                           fitted_constant=max(r[2] for r in rows),
                           fit_residual=float(np.sqrt(np.mean(resid**2))))


# ---------------------------------------------------------------------------
# van der Corput envelope

def van_der_corput_bound(m1: float, m2: float, t: float,
                         amplitude_boundary_value: float,
                         amplitude_derivative_l1: float) -> float:
    """Envelope 8/sqrt(2t) * (|Psi(m2)| + int |Psi'|) for integrals
    int_{m1}^{m2} e^{i(t mu^2 + c mu)} Psi(mu) dmu (phase curvature 2)."""
    if t <= 0:
        raise ValueError("the envelope requires t > 0")
    if m2 <= m1:
        raise ValueError("need m1 < m2")
    return 8.0 / math.sqrt(2.0 * t) * (abs(amplitude_boundary_value)
                                       + amplitude_derivative_l1)


def perturbation_bound(length: float, t: float, band: SpectralBand,
                       u0_l1: float) -> float:
    """Sup-norm bound on the queue for (tadpole - half-line) band evolution:
    t^(-1/2) * 2 sqrt(2) * L * (4 (2 sqrt b - sqrt a) + L (b - a)) * ||u0||_1."""
    if t <= 0:
        raise ValueError("the bound requires t > 0")
    a, b = band.a, band.b
    return (2.0 * math.sqrt(2.0) / math.sqrt(t) * length
            * (4.0 * (2.0 * math.sqrt(b) - math.sqrt(a)) + length * (b - a))
            * u0_l1)


# ---------------------------------------------------------------------------
# shrinking-head perturbation experiment

@dataclass(frozen=True)
class PerturbationRow:
    length: float
    t: float
    measured_sup: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.measured_sup / self.bound


@dataclass
class PerturbationReport:
    band: SpectralBand
    u0_l1: float
    rows: list[PerturbationRow] = field(default_factory=list)

    def slopes_vs_length(self) -> dict[float, float]:
        """Per-time log-log slope of measured_sup against the head length."""
        out = {}
        for t in sorted({r.t for r in self.rows}):
            pts = [(r.length, r.measured_sup) for r in self.rows if r.t == t]
            if len(pts) >= 2:
                lx = np.log([p[0] for p in pts])
                ly = np.log([p[1] for p in pts])
                out[t] = float(np.polyfit(lx, ly, 1)[0])
        return out


def perturbation_experiment(ic: InitialCondition, band: SpectralBand,
                            lengths, times, grid: GridSpec,
                            quad: QuadratureSpec | None = None,
                            ) -> PerturbationReport:
    """Measured queue sup of |tadpole - half-line| band evolution vs the bound.

    The half-line side accepts a = 0 directly; the tadpole side substitutes
    a_eff = 1e-6 in that case (the substituted spectral sliver contributes
    at most (2/pi) * sqrt(a_eff) * ||u0||_1 to either solution).
    """
    tad_band = band if band.a > 0 else SpectralBand(A_EFF_FLOOR, band.b)
    report = PerturbationReport(band=band, u0_l1=ic.l1)
    x = grid.queue_points()
    for length in sorted(lengths, reverse=True):
        geometry = TadpoleGeometry(length)
        u0 = ic.sample(geometry, grid)
        for t in sorted(times):
            u_tad = evolve(u0, tad_band, t, quad)
            u_half = evolve_neumann_halfline(x, u0.queue_values, band, t, quad)
            measured = float(np.max(np.abs(u_tad.queue_values - u_half)))
            report.rows.append(PerturbationRow(
                length, t, measured, perturbation_bound(length, t, band, ic.l1)))
    return report


def difference_consistency(u0: GraphFunction, band: SpectralBand, t: float,
                           quad: QuadratureSpec | None = None) -> float:
    """Relative sup discrepancy between the one-pass difference evolution
    and the subtraction of the two full evolutions, on the queue."""
    direct = evolve_difference_queue(u0, band, t, quad)
    x = u0.grid.queue_points()
    u_tad = evolve(u0, band, t, quad)
    u_half = evolve_neumann_halfline(x, u0.queue_values, band, t, quad)
    subtracted = u_tad.queue_values - u_half
    scale = float(np.max(np.abs(direct)))
    return float(np.max(np.abs(direct - subtracted))) / scale


# ---------------------------------------------------------------------------
# scale invariance

def scale_invariance_check(u0: GraphFunction, band: SpectralBand, t: float,
                           quad: QuadratureSpec | None = None,
                           mode: CoefficientMode = CoefficientMode.CORRECTED,
                           ) -> float:
    """Max pointwise discrepancy between the evolution on geometry L and the
    rescaled unit-head problem (x = L x_hat, t = L^2 t_hat, band scaled by
    L^2) mapped back to the original grid."""
    length = u0.geometry.head_length
    u = evolve(u0, band, t, quad, mode)

    unit = TadpoleGeometry(1.0)
    grid_hat = GridSpec(u0.grid.x_max / length, u0.grid.n_queue, u0.grid.n_head)
    # x_hat_j = x_j / L, so the sampled values carry over index by index
    u0_hat = GraphFunction(unit, grid_hat, u0.queue_values.copy(),
                           u0.head_values.copy())
    band_hat = SpectralBand(band.a * length**2, band.b * length**2)
    u_hat = evolve(u0_hat, band_hat, t / length**2, quad, mode)

    return float(max(np.max(np.abs(u.queue_values - u_hat.queue_values)),
                     np.max(np.abs(u.head_values - u_hat.head_values))))


# ---------------------------------------------------------------------------
# cycle expansion of the difference kernel

def cycle_expansion(x: float, y: float, mu: float, length: float,
                    k_terms: int) -> tuple[np.ndarray, np.ndarray]:
    """Partial sums of the difference-kernel expansion in powers of X/3.

    The tadpole-minus-half-line kernel (2i/mu) (X-1)/(X-3) e^{i mu (x+y)},
    X = exp(i mu L), expands through 1/(X-3) = -(1/3) sum_k (X/3)^k; the
    k-th term carries the phase of k windings around the head.  Returns
    (partial_sums, remainder_bounds) where remainder_bounds[k] =
    (1/2) 3^(-(k+1)) |prefactor| dominates |partial_sums[k] - limit| and
    shrinks by exactly 1/3 per added term.
    """
    if mu <= 0:
        raise ValueError("cycle expansion requires mu > 0")
    if k_terms < 1:
        raise ValueError("need at least one term")
    ring = cmath.exp(1j * mu * length)
    prefactor = (2j / mu) * (ring - 1) * cmath.exp(1j * mu * (x + y))
    partials = np.empty(k_terms, dtype=complex)
    bounds = np.empty(k_terms)
    acc = 0.0 + 0.0j
    power = 1.0 + 0.0j
    bound = abs(prefactor) / 6.0
    for k in range(k_terms):
        acc += power
        partials[k] = prefactor * (-acc / 3.0)
        bounds[k] = bound
        power *= ring / 3.0
        bound /= 3.0
    return partials, bounds


def cycle_expansion_limit(x: float, y: float, mu: float, length: float,
                          mode: CoefficientMode = CoefficientMode.CORRECTED,
                          ) -> complex:
    """The value the cycle expansion converges to (the difference kernel)."""
    return kernel_difference(x, y, mu, length, mode)
