"""Geometry, grids and sampled functions on the tadpole graph.

The tadpole (lasso) graph consists of a half-line "queue" attached at a
single vertex to a circular "head" of circumference L.  The head is
parametrised by the chart s in [0, L] with both endpoints glued to the
vertex; the queue by x >= 0 with x = 0 at the vertex.  Functions live on
uniform grids on a truncated queue [0, x_max] and on the head, and all
integrals are composite trapezoid sums.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class Edge(enum.Enum):
    QUEUE = "queue"
    HEAD = "head"


@dataclass(frozen=True)
class TadpoleGeometry:
    """Head circumference of the tadpole; the queue is a half-line."""

    head_length: float

    def __post_init__(self):
        if not (self.head_length > 0 and math.isfinite(self.head_length)):
            raise ValueError(f"head_length must be positive, got {self.head_length}")


@dataclass(frozen=True)
class GraphPoint:
    """A location on the graph: which edge, and the coordinate along it."""

    edge: Edge
    s: float

    def __post_init__(self):
        if not (self.s >= 0 and math.isfinite(self.s)):
            raise ValueError(f"coordinate must be finite and >= 0, got {self.s}")


@dataclass(frozen=True)
class SpectralBand:
    """Frequency window (a, b) for the spectral parameter, 0 <= a < b."""

    a: float
    b: float

    def __post_init__(self):
        if not (0 <= self.a < self.b < math.inf):
            raise ValueError(f"band must satisfy 0 <= a < b < inf, got ({self.a}, {self.b})")

    @property
    def mu_lo(self) -> float:
        return math.sqrt(self.a)

    @property
    def mu_hi(self) -> float:
        return math.sqrt(self.b)


@dataclass(frozen=True)
class GridSpec:
    """Uniform grids, endpoints included, on the truncated queue and the head."""

    x_max: float
    n_queue: int
    n_head: int

    def __post_init__(self):
        if not (self.x_max > 0 and math.isfinite(self.x_max)):
            raise ValueError(f"x_max must be positive, got {self.x_max}")
        if self.n_queue < 2 or self.n_head < 2:
            raise ValueError("grids need at least 2 points per edge")

    @property
    def queue_spacing(self) -> float:
        return self.x_max / (self.n_queue - 1)

    def head_spacing(self, geometry: TadpoleGeometry) -> float:
        return geometry.head_length / (self.n_head - 1)

    def queue_points(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.n_queue)

    def head_points(self, geometry: TadpoleGeometry) -> np.ndarray:
        return np.linspace(0.0, geometry.head_length, self.n_head)


def trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return w


@dataclass
class GraphFunction:
    """Complex-valued function sampled on the queue and head grids."""

    geometry: TadpoleGeometry
    grid: GridSpec
    queue_values: np.ndarray
    head_values: np.ndarray

    def __post_init__(self):
        self.queue_values = np.asarray(self.queue_values, dtype=complex)
        self.head_values = np.asarray(self.head_values, dtype=complex)
        if self.queue_values.shape != (self.grid.n_queue,):
            raise ValueError("queue_values length does not match grid")
        if self.head_values.shape != (self.grid.n_head,):
            raise ValueError("head_values length does not match grid")
        if not (np.all(np.isfinite(self.queue_values.view(float)))
                and np.all(np.isfinite(self.head_values.view(float)))):
            raise ValueError("function values must be finite")

    @classmethod
    def zeros(cls, geometry: TadpoleGeometry, grid: GridSpec) -> "GraphFunction":
        return cls(geometry, grid,
                   np.zeros(grid.n_queue, dtype=complex),
                   np.zeros(grid.n_head, dtype=complex))

    @classmethod
    def from_callables(cls, geometry: TadpoleGeometry, grid: GridSpec,
                       on_queue, on_head) -> "GraphFunction":
        """Sample `on_queue(x)` and `on_head(s)`; either may be None for zero."""
        q = (np.asarray(on_queue(grid.queue_points()), dtype=complex)
             if on_queue is not None else np.zeros(grid.n_queue, dtype=complex))
        h = (np.asarray(on_head(grid.head_points(geometry)), dtype=complex)
             if on_head is not None else np.zeros(grid.n_head, dtype=complex))
        return cls(geometry, grid, q, h)

    def copy(self) -> "GraphFunction":
        return GraphFunction(self.geometry, self.grid,
                             self.queue_values.copy(), self.head_values.copy())

    def conj(self) -> "GraphFunction":
        return GraphFunction(self.geometry, self.grid,
                             np.conj(self.queue_values), np.conj(self.head_values))

    def __add__(self, other: "GraphFunction") -> "GraphFunction":
        _require_same_grid(self, other)
        return GraphFunction(self.geometry, self.grid,
                             self.queue_values + other.queue_values,
                             self.head_values + other.head_values)

    def __sub__(self, other: "GraphFunction") -> "GraphFunction":
        _require_same_grid(self, other)
        return GraphFunction(self.geometry, self.grid,
                             self.queue_values - other.queue_values,
                             self.head_values - other.head_values)

    def __mul__(self, scalar) -> "GraphFunction":
        return GraphFunction(self.geometry, self.grid,
                             scalar * self.queue_values, scalar * self.head_values)

    __rmul__ = __mul__

    def queue_weights(self) -> np.ndarray:
        return trapezoid_weights(self.grid.n_queue, self.grid.queue_spacing)

    def head_weights(self) -> np.ndarray:
        return trapezoid_weights(self.grid.n_head, self.grid.head_spacing(self.geometry))


def _require_same_grid(f: GraphFunction, g: GraphFunction):
    if f.grid != g.grid or f.geometry != g.geometry:
        raise ValueError("graph functions live on different grids")


def vertex_trace(f: GraphFunction) -> tuple[complex, complex, complex]:
    """Values (f_queue(0), f_head(0), f_head(L)) read off the grids."""
    return (complex(f.queue_values[0]),
            complex(f.head_values[0]),
            complex(f.head_values[-1]))


def _one_sided_derivative(values: np.ndarray, h: float, at_start: bool) -> complex:
    # three-point one-sided stencil, second order
    if at_start:
        return (-3 * values[0] + 4 * values[1] - values[2]) / (2 * h)
    return (3 * values[-1] - 4 * values[-2] + values[-3]) / (2 * h)


def transmission_residuals(f: GraphFunction) -> tuple[float, float]:
    """How far f is from the vertex conditions.

    Returns (continuity, kirchhoff):
      continuity = max(|f_q(0) - f_h(0)|, |f_h(0) - f_h(L)|),
      kirchhoff  = |f_q'(0+) + f_h'(0+) - f_h'(L-)| with one-sided
                   three-point derivative stencils.
    """
    if f.grid.n_queue < 3 or f.grid.n_head < 3:
        raise ValueError("transmission residuals need at least 3 points per edge")
    q0, h0, hL = vertex_trace(f)
    continuity = max(abs(q0 - h0), abs(h0 - hL))
    hq = f.grid.queue_spacing
    hh = f.grid.head_spacing(f.geometry)
    flux = (_one_sided_derivative(f.queue_values, hq, at_start=True)
            + _one_sided_derivative(f.head_values, hh, at_start=True)
            - _one_sided_derivative(f.head_values, hh, at_start=False))
    return continuity, abs(flux)


def norms(f: GraphFunction) -> tuple[float, float, float]:
    """(L1, L2, Linf) norms; trapezoid rule per edge, summed."""
    wq, wh = f.queue_weights(), f.head_weights()
    aq, ah = np.abs(f.queue_values), np.abs(f.head_values)
    l1 = float(wq @ aq + wh @ ah)
    l2 = float(math.sqrt(wq @ aq**2 + wh @ ah**2))
    linf = float(max(aq.max(), ah.max()))
    return l1, l2, linf


def inner_product(f: GraphFunction, g: GraphFunction) -> complex:
    """Trapezoid approximation of sum_k int f_k conj(g_k)."""
    _require_same_grid(f, g)
    wq, wh = f.queue_weights(), f.head_weights()
    return complex(wq @ (f.queue_values * np.conj(g.queue_values))
                   + wh @ (f.head_values * np.conj(g.head_values)))


def queue_truncation_length(support: float, band_top: float, t_max: float) -> float:
    """Smallest admissible queue truncation for an experiment.

    Signals below the band cutoff travel at group speed at most 2*sqrt(b),
    so data supported in [0, support] stays clear of the far end up to
    time t_max with a 5-unit safety margin.
    """
    return support + 2.0 * math.sqrt(band_top) * t_max + 5.0
