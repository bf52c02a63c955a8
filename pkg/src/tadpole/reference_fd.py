"""Independent Crank-Nicolson finite-difference oracle on the truncated tadpole.

The spatial operator is the standard three-point Laplacian on each edge
with a single shared vertex unknown.  The vertex row balances the three
half-cells adjacent to the vertex, which is the lumped P1 finite-element
closure of the Kirchhoff flux condition: it keeps the operator
self-adjoint in the inner product weighted by the cell volumes
(h on interior points, (h_q + 2 h_h)/2 at the vertex), so Crank-Nicolson
stepping conserves the weighted norm exactly.  The far queue end carries
a homogeneous Dirichlet cap.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import GraphFunction, GridSpec, TadpoleGeometry

REFLECTION_WARN_LEVEL = 1e-8


@dataclass(frozen=True)
class FdScheme:
    grid: GridSpec
    geometry: TadpoleGeometry
    t_final: float
    dt: float | None = None  # default min(h_q, h_h)^2 / 2

    def resolved_dt(self) -> tuple[float, int]:
        dt = self.dt
        if dt is None:
            h = min(self.grid.queue_spacing, self.grid.head_spacing(self.geometry))
            dt = h * h / 2
        if dt <= 0:
            raise ValueError("dt must be positive")
        n_steps = max(1, int(round(self.t_final / dt)))
        return self.t_final / n_steps, n_steps


@dataclass
class DiscreteTadpoleOperator:
    """Discretized positive Laplacian A = W^{-1} S on the truncated tadpole.

    ``stiffness`` S is real symmetric; ``weights`` W are the cell volumes.
    A itself is symmetric in the W-weighted inner product
    <u, v>_W = sum_i W_i u_i conj(v_i).

    Unknown layout: [vertex, queue interior 1..n_q-2, head interior 1..n_h-2];
    the queue far end is a Dirichlet zero and both head endpoints are the
    vertex.
    """

    geometry: TadpoleGeometry
    grid: GridSpec
    stiffness: sp.csr_matrix
    weights: np.ndarray

    @property
    def matrix(self) -> sp.csr_matrix:
        return sp.diags(1.0 / self.weights) @ self.stiffness

    @property
    def size(self) -> int:
        return self.weights.size

    def embed(self, f: GraphFunction) -> np.ndarray:
        """GraphFunction -> unknown vector; vertex value is the mean of the
        three (ideally equal) traces, the capped queue endpoint is dropped."""
        nq = self.grid.n_queue
        vec = np.empty(self.size, dtype=complex)
        vec[0] = (f.queue_values[0] + f.head_values[0] + f.head_values[-1]) / 3
        vec[1:nq - 1] = f.queue_values[1:-1]
        vec[nq - 1:] = f.head_values[1:-1]
        return vec

    def extract(self, vec: np.ndarray) -> GraphFunction:
        nq, nh = self.grid.n_queue, self.grid.n_head
        queue = np.empty(nq, dtype=complex)
        head = np.empty(nh, dtype=complex)
        queue[0] = head[0] = head[-1] = vec[0]
        queue[1:-1] = vec[1:nq - 1]
        queue[-1] = 0.0
        head[1:-1] = vec[nq - 1:]
        return GraphFunction(self.geometry, self.grid, queue, head)

    def weighted_norm(self, vec: np.ndarray) -> float:
        return float(np.sqrt(self.weights @ np.abs(vec) ** 2))


def assemble_hamiltonian(grid: GridSpec, geometry: TadpoleGeometry,
                         ) -> DiscreteTadpoleOperator:
    """Assemble the vertex-coupled discrete Laplacian (see class docstring)."""
    nq, nh = grid.n_queue, grid.n_head
    hq = grid.queue_spacing
    hh = grid.head_spacing(geometry)
    n = 1 + (nq - 2) + (nh - 2)

    rows, cols, vals = [], [], []

    def add(i, j, v):
        rows.append(i)
        cols.append(j)
        vals.append(v)

    q_of = lambda i: i                 # queue local i (1..nq-2) -> global
    h_of = lambda j: nq - 2 + j        # head local j (1..nh-2) -> global

    # vertex row/column: half-cell flux balance
    add(0, 0, 1 / hq + 2 / hh)
    add(0, q_of(1), -1 / hq)
    add(q_of(1), 0, -1 / hq)
    add(0, h_of(1), -1 / hh)
    add(h_of(1), 0, -1 / hh)
    add(0, h_of(nh - 2), -1 / hh)
    add(h_of(nh - 2), 0, -1 / hh)

    for i in range(1, nq - 1):
        add(q_of(i), q_of(i), 2 / hq)
        if i + 1 <= nq - 2:
            add(q_of(i), q_of(i + 1), -1 / hq)
            add(q_of(i + 1), q_of(i), -1 / hq)
        # neighbor nq-1 is the Dirichlet cap: no entry

    for j in range(1, nh - 1):
        add(h_of(j), h_of(j), 2 / hh)
        if j + 1 <= nh - 2:
            add(h_of(j), h_of(j + 1), -1 / hh)
            add(h_of(j + 1), h_of(j), -1 / hh)

    stiffness = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    weights = np.empty(n)
    weights[0] = (hq + 2 * hh) / 2
    weights[1:nq - 1] = hq
    weights[nq - 1:] = hh
    return DiscreteTadpoleOperator(geometry, grid, stiffness, weights)


def evolve_reference(u0: GraphFunction, scheme: FdScheme) -> GraphFunction:
    """Crank-Nicolson approximation of e^{i t H} u0 on the truncated graph.

    Steps (I - i dt/2 A) u_{n+1} = (I + i dt/2 A) u_n; a warning is issued
    if the amplitude next to the queue cap ever exceeds 1e-8 (truncation
    reflections contaminating the run).
    """
    if u0.grid != scheme.grid or u0.geometry != scheme.geometry:
        raise ValueError("initial data does not live on the scheme grid")
    op = assemble_hamiltonian(scheme.grid, scheme.geometry)
    dt, n_steps = scheme.resolved_dt()
    a = op.matrix.tocsc().astype(complex)
    eye = sp.identity(op.size, format="csc", dtype=complex)
    stepper = spla.splu((eye - 0.5j * dt * a).tocsc())
    forward = (eye + 0.5j * dt * a).tocsr()

    u = op.embed(u0)
    cap_neighbor = scheme.grid.n_queue - 2  # global index next to the cap
    cap_peak = abs(u[cap_neighbor])
    for _ in range(n_steps):
        u = stepper.solve(forward @ u)
        cap_peak = max(cap_peak, abs(u[cap_neighbor]))
    if cap_peak > REFLECTION_WARN_LEVEL:
        warnings.warn(
            f"amplitude {cap_peak:.3e} reached the queue truncation cap; "
            "reflections may contaminate the solution", stacklevel=2)
    return op.extract(u)


def discrete_eigenvalue_near(op: DiscreteTadpoleOperator, target: float,
                             ) -> tuple[float, np.ndarray]:
    """Generalized eigenvalue of (S, W) closest to ``target`` (shift-invert)."""
    mass = sp.diags(op.weights).tocsc()
    vals, vecs = spla.eigsh(op.stiffness.tocsc(), k=1, M=mass, sigma=target)
    return float(vals[0]), vecs[:, 0]
