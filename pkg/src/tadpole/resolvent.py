"""Transmission coefficients and resolvent kernels on the tadpole graph.

Solving (-d^2/dx^2 - z^2) u = g edgewise with an exponential ansatz and
imposing the vertex conditions (continuity of the three traces plus the
Kirchhoff flux condition u_q'(0+) + u_h'(0+) - u_h'(L-) = 0) produces
three 3x3 linear systems for nine scattering coefficients
F1..F3, G1..G3, H1..H3 in the variable Y = exp(-omega*L), omega = -i z.
All systems share the matrix

    [[1, 1,     1      ],
     [1, Y,     1/Y    ],
     [1, Y - 1, 1 - 1/Y]]

whose determinant is D = (1/Y) (Y - 1) (Y - 3).

The sign of the third Kirchhoff right-hand side has two circulating
conventions, so both coefficient families are provided:

* ``CORRECTED`` (default): right-hand side -Y, which makes the resulting
  Green kernel symmetric, K(x, y) = K(y, x); the coefficients then
  satisfy G1 = -F2, H1 = -F3, G3 = H2.
* ``PAPER``: right-hand side +Y; its F3, G3, H3 break kernel symmetry
  and are retained for cross-checking against derivations that use this
  convention.

Kernel sign convention: ``kernel_full`` returns the kernel K of
(z^2 - H)^(-1) (classical resolvent notation R(lambda, H) with
lambda = z^2), so the solution of (H - z^2) u = g is u = -K*g; see
``apply_resolvent``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .graph import Edge, GraphFunction, GraphPoint


class CoefficientMode(enum.Enum):
    CORRECTED = "corrected"
    PAPER = "paper"


class KirchhoffSign(enum.Enum):
    """Right-hand side sign of the third Kirchhoff equation."""

    PAPER_PLUS = "paper_plus"
    DERIVED_MINUS = "derived_minus"


class PoleError(ValueError):
    """Evaluation requested at (or numerically on top of) a kernel pole.

    ``index`` is the nearest pole index k, meaning z ~ 2*k*pi/L (k = 0 is
    the spectral origin).
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class TransmissionCoefficients:
    f1: complex
    f2: complex
    f3: complex
    g1: complex
    g2: complex
    g3: complex
    h1: complex
    h2: complex
    h3: complex
    mode: CoefficientMode


_POLE_TOL = 1e-12


def _nearest_pole_index(z: complex, length: float) -> int:
    return int(round((z * length / (2 * math.pi)).real))


def determinant(z: complex, length: float) -> complex:
    """Shared system determinant D = e^{omega L}(Y - 1)(Y - 3), Y = e^{-omega L}."""
    omega = -1j * z
    y = cmath.exp(-omega * length)
    return (1 / y) * (y - 1) * (y - 3)


def coefficients_closed_form(z: complex, length: float,
                             mode: CoefficientMode = CoefficientMode.CORRECTED,
                             ) -> TransmissionCoefficients:
    """Closed-form transmission coefficients at spectral parameter z.

    Raises PoleError at Y = 1 (real z = 2*k*pi/L, where the G2..H3 family
    blows up) and at Y = 3 (never on the physical axis).
    """
    omega = -1j * z
    y = cmath.exp(-omega * length)
    if abs(y - 3) < _POLE_TOL:
        raise PoleError("coefficient pole: exp(-omega L) = 3")
    det = (1 / y) * (y - 1) * (y - 3)
    if abs(y - 1) < _POLE_TOL:
        raise PoleError("coefficient pole: exp(-omega L) = 1",
                        index=_nearest_pole_index(z, length))
    f1 = 1 + 2 * (y + 1) / (y - 3)
    g1 = -2 / (y - 3)
    h1 = -2 * y / (y - 3)
    f2 = 2 / (y - 3)
    g2 = -(1 / y) / det
    h2 = (2 - y) / det
    if mode is CoefficientMode.CORRECTED:
        f3 = 2 * y / (y - 3)
        g3 = (2 - y) / det
        h3 = -y / det
    else:
        f3 = -2 * y * y / (y - 3)
        g3 = y / det
        h3 = y * (2 * y - 3) / det
    return TransmissionCoefficients(f1, f2, f3, g1, g2, g3, h1, h2, h3, mode)


def _system_matrix(y: complex) -> np.ndarray:
    return np.array([[1, 1, 1],
                     [1, y, 1 / y],
                     [1, y - 1, 1 - 1 / y]], dtype=complex)


def _system_rhs(y: complex, sign: KirchhoffSign) -> np.ndarray:
    third = y if sign is KirchhoffSign.PAPER_PLUS else -y
    return np.array([[1, -1, 0],
                     [1, 0, -y],
                     [-1, -1, third]], dtype=complex).T  # rows: system index


def coefficients_oracle(z: complex, length: float,
                        sign: KirchhoffSign = KirchhoffSign.DERIVED_MINUS,
                        ) -> TransmissionCoefficients:
    """Coefficients by numerically solving the three 3x3 vertex systems.

    Independent of the closed forms; `sign` selects the right-hand side of
    the third Kirchhoff equation: -e^{-omega L} as obtained by
    differentiating the exponential ansatz (pairs with CORRECTED), or
    +e^{-omega L} (pairs with PAPER).
    """
    omega = -1j * z
    y = cmath.exp(-omega * length)
    m = _system_matrix(y)
    if abs(np.linalg.det(m)) < _POLE_TOL * max(1.0, abs(y) ** 2):
        raise PoleError("singular vertex system",
                        index=_nearest_pole_index(z, length))
    rhs = _system_rhs(y, sign)
    sols = np.linalg.solve(m, rhs.T)  # columns: (F, G, H) per system
    (f1, g1, h1), (f2, g2, h2), (f3, g3, h3) = sols.T
    mode = (CoefficientMode.CORRECTED if sign is KirchhoffSign.DERIVED_MINUS
            else CoefficientMode.PAPER)
    return TransmissionCoefficients(f1, f2, f3, g1, g2, g3, h1, h2, h3, mode)


def system_residuals(coeffs: TransmissionCoefficients, z: complex, length: float,
                     sign: KirchhoffSign) -> np.ndarray:
    """Absolute residuals of the nine vertex equations for given coefficients."""
    omega = -1j * z
    y = cmath.exp(-omega * length)
    c = coeffs
    res = [
        # continuity, first trace equation per system
        c.g1 + c.h1 - (1 - c.f1),
        1 + c.g2 + c.h2 - (-c.f2),
        c.g3 + c.h3 - (-c.f3),
        # continuity, second trace equation per system
        c.g1 * y + c.h1 / y - (1 - c.f1),
        c.g2 * y + c.h2 / y - (-c.f2),
        (1 + c.g3) * y + c.h3 / y - (-c.f3),
        # Kirchhoff rows
        c.f1 + c.g1 * (y - 1) + c.h1 * (1 - 1 / y) - (-1),
        c.f2 + c.g2 * (y - 1) + c.h2 * (1 - 1 / y) - (-1),
        c.f3 + c.g3 * (y - 1) + c.h3 * (1 - 1 / y)
        - (y if sign is KirchhoffSign.PAPER_PLUS else -y),
    ]
    return np.abs(np.array(res, dtype=complex))


def _head_range_check(p: GraphPoint, length: float):
    if p.edge is Edge.HEAD and p.s > length * (1 + 1e-12):
        raise ValueError(f"head coordinate {p.s} exceeds circumference {length}")


def kernel_full(x: GraphPoint, y: GraphPoint, z: complex, length: float,
                mode: CoefficientMode = CoefficientMode.CORRECTED) -> complex:
    """Green kernel K(x, y, z^2) of (z^2 - H)^(-1), for Im z > 0."""
    if z.imag <= 0:
        raise ValueError("kernel_full requires Im z > 0")
    c = coefficients_closed_form(z, length, mode)
    return _kernel_cases(x, y, z, length, c)


def _kernel_cases(x: GraphPoint, y: GraphPoint, z: complex, length: float,
                  c: TransmissionCoefficients) -> complex:
    _head_range_check(x, length)
    _head_range_check(y, length)
    pref = 1 / (2j * z)
    xs, ys = x.s, y.s
    if x.edge is Edge.QUEUE and y.edge is Edge.QUEUE:
        return pref * (cmath.exp(1j * z * abs(xs - ys))
                       - c.f1 * cmath.exp(1j * z * (xs + ys)))
    if x.edge is Edge.QUEUE and y.edge is Edge.HEAD:
        return -pref * (c.f2 * cmath.exp(1j * z * (ys + xs))
                        + c.f3 * cmath.exp(-1j * z * (ys - xs)))
    if x.edge is Edge.HEAD and y.edge is Edge.QUEUE:
        return pref * (c.g1 * cmath.exp(1j * z * (ys + xs))
                       + c.h1 * cmath.exp(1j * z * (ys - xs)))
    return pref * (cmath.exp(1j * z * abs(xs - ys))
                   + c.g2 * cmath.exp(1j * z * (ys + xs))
                   + c.g3 * cmath.exp(-1j * z * (ys - xs))
                   + c.h2 * cmath.exp(-1j * z * (xs - ys))
                   + c.h3 * cmath.exp(-1j * z * (xs + ys)))


def kernel_point(x: GraphPoint, y: GraphPoint, z: complex, length: float) -> complex:
    """Meromorphic part of the kernel: confined head modes.

    Zero unless both points lie on the head; poles at z = 0 and at the
    head wavenumbers z = 2*k*pi/L.
    """
    if x.edge is not Edge.HEAD or y.edge is not Edge.HEAD:
        return 0.0 + 0.0j
    _head_range_check(x, length)
    _head_range_check(y, length)
    half = z * length / 2
    if abs(z) < _POLE_TOL or abs(cmath.sin(half)) < _POLE_TOL * max(1.0, abs(cmath.cos(half))):
        raise PoleError(f"kernel_point pole near z = {z}",
                        index=_nearest_pole_index(z, length))
    return (cmath.cos(half) / (2 * z * cmath.sin(half))
            * cmath.sin(z * x.s) * cmath.sin(z * y.s))


def kernel_continuous(x: GraphPoint, y: GraphPoint, z: complex, length: float,
                      mode: CoefficientMode = CoefficientMode.CORRECTED) -> complex:
    """Continuous-spectrum part K_c = K - K_p, regular on the real axis (z != 0).

    Off the head this is the full kernel evaluated directly (it is analytic
    across the real axis away from z = 0).  On the head the (X-1)
    denominators of the coefficients cancel against the pole part; the
    closed form used here contains only (X-3) denominators with
    X = exp(izL), so the removable points z = 2*k*pi/L evaluate cleanly.
    """
    if z == 0:
        raise ValueError("kernel_continuous is singular at z = 0")
    if z.imag < 0:
        raise ValueError("kernel_continuous requires Im z >= 0")
    _head_range_check(x, length)
    _head_range_check(y, length)
    if x.edge is not Edge.HEAD or y.edge is not Edge.HEAD:
        c = coefficients_closed_form(z, length, mode)
        return _kernel_cases(x, y, z, length, c)
    ring = cmath.exp(1j * z * length)
    pref = 1 / (2j * z)
    xs, ys = x.s, y.s
    value = pref * (cmath.exp(1j * z * abs(xs - ys))
                    + (1 + 2 / (ring - 3)) * cmath.sin(z * xs) * cmath.sin(z * ys)
                    - (2 * (ring - 1) * cmath.cos(z * (xs - ys))
                       + (ring + 1) * cmath.exp(-1j * z * (xs + ys))) / (ring - 3))
    if mode is CoefficientMode.PAPER:
        # regularized form of (K_paper - K_p): the paper-mode G3/H3 differ
        # from the corrected ones by terms with only (X-3) denominators
        value += pref * (2 * ring / (ring - 3) * cmath.exp(1j * z * (xs - ys))
                         + 2 * ring * ring / (ring - 3) * cmath.exp(-1j * z * (xs + ys)))
    return value


def kernel_neumann_halfline(x: float, y: float, z: complex) -> complex:
    """Green kernel of (z^2 - H0)^(-1) on the Neumann half-line."""
    if z == 0:
        raise ValueError("kernel_neumann_halfline is singular at z = 0")
    if x < 0 or y < 0:
        raise ValueError("half-line coordinates must be >= 0")
    return (cmath.exp(1j * z * abs(x - y)) + cmath.exp(1j * z * (x + y))) / (2j * z)


def kernel_difference(x: float, y: float, mu: float, length: float,
                      mode: CoefficientMode = CoefficientMode.CORRECTED) -> complex:
    """Queue-queue kernel minus the Neumann half-line kernel at real mu > 0.

    Computed by direct subtraction; algebraically equals
    (2i/mu) * (X-1)/(X-3) * exp(i mu (x+y)) with X = exp(i mu L), in
    either coefficient mode (F1 is mode-independent).
    """
    if mu <= 0:
        raise ValueError("kernel_difference requires mu > 0")
    zz = complex(mu)
    tad = kernel_continuous(GraphPoint(Edge.QUEUE, x), GraphPoint(Edge.QUEUE, y),
                            zz, length, mode)
    return tad - kernel_neumann_halfline(x, y, zz)


def apply_resolvent(g: GraphFunction, z: complex,
                    mode: CoefficientMode = CoefficientMode.CORRECTED) -> GraphFunction:
    """Solve (H - z^2) u = g for Im z > 0 by quadrature against the kernel.

    The sampled kernel is the (z^2 - H)^(-1) kernel of ``kernel_full``, so
    u = -K*g; the returned function satisfies -u'' - z^2 u = g on each edge
    up to O(h^2) and the vertex conditions exactly (the kernel enforces
    them pointwise).
    """
    if z.imag <= 0:
        raise ValueError("apply_resolvent requires Im z > 0")
    length = g.geometry.head_length
    c = coefficients_closed_form(z, length, mode)
    xq = g.grid.queue_points()
    xh = g.grid.head_points(g.geometry)
    pref = 1 / (2j * z)

    eq = np.exp(1j * z * xq)           # e^{izx} on the queue
    eh_p = np.exp(1j * z * xh)         # e^{izs} on the head
    eh_m = np.exp(-1j * z * xh)

    hq = g.grid.queue_spacing
    hh = g.grid.head_spacing(g.geometry)
    pre_q_p = _filon_prefix(z, hq, g.queue_values, +1)
    pre_q_m = _filon_prefix(z, hq, g.queue_values, -1)
    pre_h_p = _filon_prefix(z, hh, g.head_values, +1)
    pre_h_m = _filon_prefix(z, hh, g.head_values, -1)
    mq_p = pre_q_p[-1]
    mh_p = pre_h_p[-1]
    mh_m = pre_h_m[-1]

    # e^{iz|x-y|} g: e^{izx} (e^{-izy} panels below x) + e^{-izx} (rest)
    free_q = eq * pre_q_m + (1 / eq) * (mq_p - pre_q_p)
    free_h = eh_p * pre_h_m + eh_m * (mh_p - pre_h_p)

    u_queue = pref * (free_q - c.f1 * eq * mq_p) \
        - pref * (c.f2 * eq * mh_p + c.f3 * eq * mh_m)
    u_head = pref * (free_h
                     + c.g2 * eh_p * mh_p
                     + c.g3 * eh_p * mh_m
                     + c.h2 * eh_m * mh_p
                     + c.h3 * eh_m * mh_m) \
        + pref * (c.g1 * eh_p * mq_p + c.h1 * eh_m * mq_p)

    # kernel is the (z^2 - H)^(-1) kernel; flip sign to solve (H - z^2) u = g
    return GraphFunction(g.geometry, g.grid, -u_queue, -u_head)


def _filon_prefix(z: complex, h: float, values: np.ndarray, sgn: int) -> np.ndarray:
    """Prefix sums of int e^{sgn*izy} g(y) dy over the panels below each node.

    Each panel integrates the exponential against the linear interpolant of
    g exactly (product integration).  Plain trapezoid would do for smooth
    moments, but the free-kernel term e^{iz|x-y|} kinks at y = x and its
    trapezoid error has a non-smooth O(h^3) component that spoils
    finite-difference residual checks; product integration keeps the error
    smooth and O(h^2).  Entry [k] covers panels 0..k-1 and entry [-1] is
    the full moment; grid nodes never sit inside a panel, so the kernel's
    split at y = x is exact.
    """
    izs = sgn * 1j * z
    e0 = (np.exp(izs * h) - 1) / izs                 # int_0^h e^{izs tau} dtau
    e1 = (h * np.exp(izs * h) - e0) / izs            # int_0^h tau e^{izs tau} dtau
    left = values[:-1]
    slope = (values[1:] - values[:-1]) / h
    nodes = h * np.arange(values.size)
    panel = np.exp(izs * nodes[:-1]) * (left * e0 + slope * e1)
    return np.concatenate(([0], np.cumsum(panel)))
