"""Band-filtered Schrodinger evolution on the tadpole and the half-line.

The absolutely continuous part of e^{itH} restricted to a spectral band
(a, b) has the kernel

    -(2/pi) int_{sqrt a}^{sqrt b} e^{it mu^2} Im K_c(x, y, mu^2) mu dmu,

where K_c is the continuous part of the resolvent kernel evaluated on the
real axis from above.  Writing 2*i*mu*K_c as a sum of terms
A(mu) e^{i mu (alpha x + beta y)} with alpha, beta in {-1, +1} and A
rational in the head phase factor exp(i mu L), the density becomes

    (1/2pi) sum_terms [A e^{i mu (ax+by)} + conj(A) e^{-i mu (ax+by)}],

which is separable in x and y.  Evolution of sampled data therefore needs
one set of data moments sum_j w_j f_j e^{+-i mu y_j} per edge and two
matrix-vector products per output edge and node chunk.  The outer mu
integral is handled by the adaptive oscillatory panel quadrature.

The point-spectrum part of the band evolution (head-confined modes with
eigenvalue inside the band) is added separately.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import Edge, GraphFunction, GraphPoint, SpectralBand
from .quadrature import QuadratureSpec, adaptive_oscillatory_sum
from .resolvent import CoefficientMode
from .spectral import default_k_max, pp_band_evolution

# Extra linear-phase budget for the slowly varying coefficient amplitudes:
# they are rational in exp(i mu L) and their geometric tails decay by 1/3
# per winding, so a few head lengths cover them.
_AMPLITUDE_WINDINGS = 3


def _coefficient_amplitudes(ring: np.ndarray, mode: CoefficientMode) -> dict:
    """Vectorized coefficient values at real mu, as functions of exp(i mu L)."""
    den = ring - 3
    s = (ring - 1) / den
    amps = {
        "one": np.ones_like(ring),
        "f1": 1 + 2 * (ring + 1) / den,
        "f2": 2 / den,
        "g1": -2 / den,
        "h1": -2 * ring / den,
        "s": s,
        "tail": (ring + 1) / den,
    }
    if mode is CoefficientMode.CORRECTED:
        amps["f3"] = 2 * ring / den
    else:
        amps["f3"] = -2 * ring * ring / den
        amps["paper_xy"] = 2 * ring / den
        amps["paper_sum"] = 2 * ring * ring / den
    return amps


def _term_table(out_edge: Edge, in_edge: Edge, mode: CoefficientMode):
    """Terms (alpha, beta, sign, key) with amplitude sign*amps[key] for
    2*i*mu*K_c = sum A(mu) e^{i mu (alpha x + beta y)}."""
    if out_edge is Edge.QUEUE and in_edge is Edge.QUEUE:
        return [(+1, -1, 1.0, "one"), (+1, +1, -1.0, "f1")]
    if out_edge is Edge.QUEUE and in_edge is Edge.HEAD:
        return [(+1, +1, -1.0, "f2"), (+1, -1, -1.0, "f3")]
    if out_edge is Edge.HEAD and in_edge is Edge.QUEUE:
        return [(+1, +1, 1.0, "g1"), (-1, +1, 1.0, "h1")]
    terms = [
        (+1, -1, 1.0, "one"),
        # (1 + 2/(X-3)) sin(mu x) sin(mu y)
        (+1, +1, -0.25, "s"), (+1, -1, 0.25, "s"),
        (-1, +1, 0.25, "s"), (-1, -1, -0.25, "s"),
        # -2 (X-1) cos(mu (x-y)) / (X-3)
        (+1, -1, -1.0, "s"), (-1, +1, -1.0, "s"),
        # -(X+1) e^{-i mu (x+y)} / (X-3)
        (-1, -1, -1.0, "tail"),
    ]
    if mode is CoefficientMode.PAPER:
        terms += [(+1, -1, 1.0, "paper_xy"), (-1, -1, 1.0, "paper_sum")]
    return terms


def _require_ac_band(band: SpectralBand):
    if band.a <= 0:
        raise ValueError(
            "band-filtered tadpole evolution needs a > 0 (the continuous "
            "kernel is singular at the spectral origin); a = 0 is reached "
            "only as a limit")


def band_kernel(x: GraphPoint, y: GraphPoint, band: SpectralBand, t: float,
                length: float, quad: QuadratureSpec | None = None,
                mode: CoefficientMode = CoefficientMode.CORRECTED) -> complex:
    """Kernel of e^{itH} 1_{(a,b)}(H) P_ac at a pair of graph points."""
    _require_ac_band(band)
    terms = _term_table(x.edge, y.edge, mode)

    def apply_nodes(mu, w):
        ring = np.exp(1j * mu * length)
        amps = _coefficient_amplitudes(ring, mode)
        phase = np.exp(1j * t * mu * mu)
        density = np.zeros_like(ring)
        for alpha, beta, sign, key in terms:
            a_vals = sign * amps[key]
            osc = np.exp(1j * mu * (alpha * x.s + beta * y.s))
            density += a_vals * osc + np.conj(a_vals * osc)
        return complex(w @ (phase * density)) / (2 * math.pi)

    c_budget = x.s + y.s + _AMPLITUDE_WINDINGS * length
    value, _ = adaptive_oscillatory_sum(apply_nodes, band.mu_lo, band.mu_hi,
                                        t, c_budget, quad)
    return value


def _support_slice(values: np.ndarray) -> slice | None:
    idx = np.nonzero(np.abs(values) > 0)[0]
    if idx.size == 0:
        return None
    return slice(int(idx[0]), int(idx[-1]) + 1)


def _ac_band_apply(f: GraphFunction, band: SpectralBand, t: float,
                   quad: QuadratureSpec | None, mode: CoefficientMode):
    """Absolutely continuous band evolution of sampled data, both edges."""
    geom, grid = f.geometry, f.grid
    length = geom.head_length
    xq = grid.queue_points()
    xh = grid.head_points(geom)
    data = {
        Edge.QUEUE: (xq, f.queue_weights() * f.queue_values),
        Edge.HEAD: (xh, f.head_weights() * f.head_values),
    }
    support = {edge: _support_slice(vals) for edge, (_, vals) in data.items()}
    in_edges = [e for e in (Edge.QUEUE, Edge.HEAD) if support[e] is not None]
    n_queue = grid.n_queue

    def apply_nodes(mu, w):
        ring = np.exp(1j * mu * length)
        amps = _coefficient_amplitudes(ring, mode)
        exp_mats = {
            Edge.QUEUE: np.exp(1j * np.outer(xq, mu)),
            Edge.HEAD: np.exp(1j * np.outer(xh, mu)),
        }
        moments = {}
        for edge in in_edges:
            sel = support[edge]
            wf = data[edge][1][sel]
            e_rows = exp_mats[edge][sel]
            moments[edge, +1] = wf @ e_rows
            moments[edge, -1] = np.conj(np.conj(wf) @ e_rows)

        weighted_phase = w * np.exp(1j * t * mu * mu) / (2 * math.pi)
        out = np.empty(n_queue + grid.n_head, dtype=complex)
        for out_edge, view in ((Edge.QUEUE, np.s_[:n_queue]),
                               (Edge.HEAD, np.s_[n_queue:])):
            d_plus = np.zeros_like(mu, dtype=complex)
            d_minus = np.zeros_like(d_plus)
            for in_edge in in_edges:
                for alpha, beta, sign, key in _term_table(out_edge, in_edge, mode):
                    a_vals = sign * amps[key] * moments[in_edge, beta]
                    if alpha > 0:
                        d_plus += a_vals
                    else:
                        d_minus += a_vals
                    # conjugate partner term (-alpha, -beta, conj A)
                    a_conj = np.conj(sign * amps[key]) * moments[in_edge, -beta]
                    if alpha > 0:
                        d_minus += a_conj
                    else:
                        d_plus += a_conj
            e_mat = exp_mats[out_edge]
            out[view] = (e_mat @ (weighted_phase * d_plus)
                         + np.conj(e_mat @ np.conj(weighted_phase * d_minus)))
        return out

    supp_max = 0.0
    for edge in in_edges:
        pts = data[edge][0]
        supp_max = max(supp_max, float(pts[support[edge]][-1]))
    c_budget = grid.x_max + supp_max + _AMPLITUDE_WINDINGS * length
    values, _ = adaptive_oscillatory_sum(apply_nodes, band.mu_lo, band.mu_hi,
                                         t, c_budget, quad)
    return GraphFunction(geom, grid, values[:n_queue], values[n_queue:])


def evolve(f: GraphFunction, band: SpectralBand, t: float,
           quad: QuadratureSpec | None = None,
           mode: CoefficientMode = CoefficientMode.CORRECTED,
           k_max: int | None = None) -> GraphFunction:
    """Band-filtered propagator e^{itH} 1_{(a,b)}(H) applied to sampled data.

    Continuous part by oscillatory quadrature of the spectral density,
    point part by the eigenmode sum over eigenvalues inside the band.
    """
    _require_ac_band(band)
    if k_max is None:
        k_max = default_k_max(f.geometry, f.grid, band)
    ac = _ac_band_apply(f, band, t, quad, mode)
    return ac + pp_band_evolution(f, band, t, k_max)


def evolve_neumann_halfline(x: np.ndarray, u0: np.ndarray, band: SpectralBand,
                            t: float,
                            quad: QuadratureSpec | None = None) -> np.ndarray:
    """Band-filtered evolution on the Neumann half-line via the cosine transform.

    u(t, x) = (2/pi) int_{sqrt a}^{sqrt b} e^{it mu^2} cos(mu x)
              (int cos(mu y) u0(y) dy) dmu

    ``x`` must be a uniform grid starting at 0; the inner transform is a
    trapezoid sum on it.  Here a = 0 is allowed.
    """
    x = np.asarray(x, dtype=float)
    u0 = np.asarray(u0, dtype=complex)
    if x.ndim != 1 or x.size < 2 or x[0] != 0:
        raise ValueError("expected a uniform half-line grid starting at 0")
    h = x[1] - x[0]
    if not np.allclose(np.diff(x), h, rtol=1e-10, atol=0):
        raise ValueError("expected a uniform half-line grid")
    w_data = np.full(x.size, h)
    w_data[0] = w_data[-1] = h / 2
    wf = w_data * u0
    sel = _support_slice(wf)
    if sel is None:
        return np.zeros_like(u0)

    def apply_nodes(mu, w):
        e_mat = np.exp(1j * np.outer(x, mu))
        cosine_moment = wf[sel] @ e_mat[sel].real
        wpc = w * np.exp(1j * t * mu * mu) * cosine_moment / math.pi
        return e_mat @ wpc + np.conj(e_mat @ np.conj(wpc))

    c_budget = float(x[-1] + x[sel][-1])
    values, _ = adaptive_oscillatory_sum(apply_nodes, band.mu_lo, band.mu_hi,
                                         t, c_budget, quad)
    return values


def evolve_difference_queue(u0: GraphFunction, band: SpectralBand, t: float,
                            quad: QuadratureSpec | None = None) -> np.ndarray:
    """Queue trace of (tadpole band evolution) minus (half-line band evolution).

    Computed in one pass from the spectral density of the resolvent-kernel
    difference, -(2/pi) [Q e^{i mu (x+y)} + conj(Q) e^{-i mu (x+y)}] with
    Q = (X-1)/(X-3), X = exp(i mu L); the initial data must be supported
    on the queue.  Equals evolve(...) minus evolve_neumann_halfline(...)
    up to quadrature tolerance.
    """
    _require_ac_band(band)
    if np.max(np.abs(u0.head_values)) > 1e-12 * max(1.0, np.max(np.abs(u0.queue_values))):
        raise ValueError("difference evolution requires data supported on the queue")
    length = u0.geometry.head_length
    x = u0.grid.queue_points()
    wf = u0.queue_weights() * u0.queue_values
    sel = _support_slice(wf)
    if sel is None:
        return np.zeros(u0.grid.n_queue, dtype=complex)

    def apply_nodes(mu, w):
        ring = np.exp(1j * mu * length)
        q_amp = (ring - 1) / (ring - 3)
        e_mat = np.exp(1j * np.outer(x, mu))
        m_plus = wf[sel] @ e_mat[sel]
        m_minus = np.conj(np.conj(wf[sel]) @ e_mat[sel])
        weighted_phase = -2.0 / math.pi * w * np.exp(1j * t * mu * mu)
        d_plus = weighted_phase * q_amp * m_plus
        d_minus = weighted_phase * np.conj(q_amp) * m_minus
        return e_mat @ d_plus + np.conj(e_mat @ np.conj(d_minus))

    c_budget = float(x[-1] + x[sel][-1] + _AMPLITUDE_WINDINGS * length)
    values, _ = adaptive_oscillatory_sum(apply_nodes, band.mu_lo, band.mu_hi,
                                         t, c_budget, quad)
    return values
