"""Point spectrum of the tadpole Laplacian and the associated projections.

The eigenfunctions are confined to the head: sqrt(2/L) sin(2k pi s / L)
with eigenvalue (2k pi / L)^2, k = 1, 2, ...  They vanish at the vertex
together with their Kirchhoff flux, so they never couple to the queue.
The span of these modes carries the point spectrum; its complement is
the absolutely continuous subspace.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .graph import (GraphFunction, GridSpec, SpectralBand, TadpoleGeometry,
                    inner_product)

K_MAX_PADDING = 4


@dataclass(frozen=True)
class EigenPair:
    k: int
    wavenumber: float       # 2 k pi / L
    eigenvalue: float       # wavenumber squared
    eigenfunction: GraphFunction


def eigenvalue(k: int, length: float) -> float:
    """k-th head-confined eigenvalue, 4 k^2 pi^2 / L^2."""
    if k < 1:
        raise ValueError("eigenvalue index starts at k = 1")
    return 4.0 * k**2 * math.pi**2 / length**2


def eigenfunction(k: int, geometry: TadpoleGeometry, grid: GridSpec) -> GraphFunction:
    """Sampled head-confined eigenfunction sqrt(2/L) sin(2 k pi s / L)."""
    if k < 1:
        raise ValueError("eigenfunction index starts at k = 1")
    length = geometry.head_length
    lam = 2.0 * k * math.pi / length
    return GraphFunction.from_callables(
        geometry, grid, None,
        lambda s: math.sqrt(2.0 / length) * np.sin(lam * s))


def eigen_pair(k: int, geometry: TadpoleGeometry, grid: GridSpec) -> EigenPair:
    lam = 2.0 * k * math.pi / geometry.head_length
    return EigenPair(k, lam, lam * lam, eigenfunction(k, geometry, grid))


def dirichlet_mode(ell: int, geometry: TadpoleGeometry, grid: GridSpec) -> GraphFunction:
    """Head-supported Dirichlet sine mode sqrt(2/L) sin(ell pi s / L).

    Even ell = 2k reproduces ``eigenfunction(k)``; odd modes vanish at the
    vertex but carry nonzero Kirchhoff flux, so they are not eigenmodes.
    """
    if ell < 1:
        raise ValueError("mode index starts at 1")
    length = geometry.head_length
    lam = ell * math.pi / length
    return GraphFunction.from_callables(
        geometry, grid, None,
        lambda s: math.sqrt(2.0 / length) * np.sin(lam * s))


def default_k_max(geometry: TadpoleGeometry, grid: GridSpec,
                  band: SpectralBand | None = None) -> int:
    """Truncation index for eigenmode sums.

    ceil(L * mu_max / (2 pi)) plus padding, where mu_max is sqrt(b) for
    band-limited work and the head-grid Nyquist wavenumber pi/h otherwise.
    Hard-capped below Nyquist: sampled sine modes at or above it alias
    onto lower modes and would corrupt the projection.
    """
    length = geometry.head_length
    if band is not None:
        mu_max = math.sqrt(band.b)
    else:
        mu_max = math.pi / grid.head_spacing(geometry)
    k_rule = math.ceil(length * mu_max / (2 * math.pi)) + K_MAX_PADDING
    k_nyquist = (grid.n_head - 2) // 2
    return max(1, min(k_rule, k_nyquist))


def project_pp(f: GraphFunction, k_max: int | None = None) -> GraphFunction:
    """Projection onto the span of the head-confined eigenfunctions."""
    if k_max is None:
        k_max = default_k_max(f.geometry, f.grid)
    out = GraphFunction.zeros(f.geometry, f.grid)
    for k in range(1, k_max + 1):
        phi = eigenfunction(k, f.geometry, f.grid)
        out = out + inner_product(f, phi) * phi
    return out


def project_ac(f: GraphFunction, k_max: int | None = None) -> GraphFunction:
    """Absolutely continuous part: f minus its point-spectrum projection."""
    return f - project_pp(f, k_max)


def pp_band_evolution(f: GraphFunction, band: SpectralBand, t: float,
                      k_max: int | None = None) -> GraphFunction:
    """Point-spectrum part of e^{itH} restricted to eigenvalues inside (a, b).

    Sum over k with a < (2 k pi / L)^2 < b (strict) of
    e^{it lambda_k} <f, phi_k> phi_k.
    """
    if k_max is None:
        k_max = default_k_max(f.geometry, f.grid, band)
    out = GraphFunction.zeros(f.geometry, f.grid)
    for k in range(1, k_max + 1):
        lam = eigenvalue(k, f.geometry.head_length)
        if min(abs(lam - band.a), abs(lam - band.b)) < 1e-9:
            warnings.warn(
                f"band endpoint within 1e-9 of eigenvalue {lam} (k={k}); "
                "membership is numerically fragile", stacklevel=2)
        if band.a < lam < band.b:
            phi = eigenfunction(k, f.geometry, f.grid)
            out = out + (np.exp(1j * t * lam) * inner_product(f, phi)) * phi
    return out
