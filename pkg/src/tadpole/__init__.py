"""Resolvent kernels, spectral calculus and band-filtered Schrodinger
dynamics on the tadpole graph (a half-line queue joined to a circular head),
with an independent Crank-Nicolson oracle and experiment drivers."""

from .graph import (Edge, GraphFunction, GraphPoint, GridSpec, SpectralBand,
                    TadpoleGeometry, inner_product, norms,
                    queue_truncation_length, transmission_residuals,
                    vertex_trace)
from .quadrature import (NonConvergenceError, QuadratureSpec,
                         oscillatory_integral, oscillatory_integral_with_error)
from .resolvent import (CoefficientMode, KirchhoffSign, PoleError,
                        TransmissionCoefficients, apply_resolvent,
                        coefficients_closed_form, coefficients_oracle,
                        determinant, kernel_continuous, kernel_difference,
                        kernel_full, kernel_neumann_halfline, kernel_point,
                        system_residuals)
from .spectral import (EigenPair, default_k_max, dirichlet_mode, eigen_pair,
                       eigenfunction, eigenvalue, pp_band_evolution,
                       project_ac, project_pp)
from .propagator import (band_kernel, evolve, evolve_difference_queue,
                         evolve_neumann_halfline)
from .reference_fd import (DiscreteTadpoleOperator, FdScheme,
                           assemble_hamiltonian, discrete_eigenvalue_near,
                           evolve_reference)
from .analysis import (DecayScanResult, InitialCondition, PerturbationReport,
                       PerturbationRow, cycle_expansion, cycle_expansion_limit,
                       decay_scan, default_grid_for, difference_consistency,
                       make_initial_condition, perturbation_bound,
                       perturbation_experiment, scale_invariance_check,
                       van_der_corput_bound)

__version__ = "0.1.0"
