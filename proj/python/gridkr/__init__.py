"""Fourier-exact MSE of kernel ridgeless interpolation on torus grids."""

try:
    from ._gridkr import (
        DegenerateClassError,
        SingularKernelError,
        Spectrum,
        certify,
        closed_form_coeff,
        eigenvalues,
        monte_carlo,
        mse_report,
        noisy_error_deterministic,
        solve,
        spectrum,
    )
except ImportError:  # in-tree builds put the module next to the package
    from _gridkr import (
        DegenerateClassError,
        SingularKernelError,
        Spectrum,
        certify,
        closed_form_coeff,
        eigenvalues,
        monte_carlo,
        mse_report,
        noisy_error_deterministic,
        solve,
        spectrum,
    )

__all__ = [
    "DegenerateClassError",
    "SingularKernelError",
    "Spectrum",
    "certify",
    "closed_form_coeff",
    "eigenvalues",
    "monte_carlo",
    "mse_report",
    "noisy_error_deterministic",
    "solve",
    "spectrum",
]
