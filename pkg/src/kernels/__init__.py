"""
Random-walk kernels, return probabilities and Green functions.

Kernels are normalized jump tables on Z^d. Return probabilities and Green
values come from Fourier quadrature over the torus (separable Bessel
evaluation for the discrete Laplacian), and return sources are exposed to the
rest of the lab through ReturnProfile implementations.

Example:
    >>> from src.kernels import kernel_from_text, symmetrize, green_values
    >>> k = symmetrize(kernel_from_text("laplacian:d=3"))
    >>> round(green_values(k).green, 4)
    0.7582

Modules:
    builder: make_kernel, symmetrize and the kernel spec grammar
    fourier: FourierQuadrature, return_probability, green_values
    timedomain: Laplace integrals of sampled or closed-form return probabilities
    curves: return_curve and tail fitting
    profiles: KernelProfile, ExponentialProfile, CurveProfile, FunctionProfile
"""

from src.kernels.builder import (
    KernelSpec,
    kernel_from_text,
    make_kernel,
    parse_kernel_spec,
    symmetrize,
)
from src.kernels.curves import default_grid, fit_tail, kernel_tail, return_curve
from src.kernels.fourier import (
    FourierQuadrature,
    default_quadrature,
    green_values,
    laplacian_return,
    return_probability,
    singular_order,
)
from src.kernels.profiles import (
    CurveProfile,
    ExponentialProfile,
    FunctionProfile,
    KernelProfile,
    as_profile,
    symmetrized_profile,
)
from src.kernels.timedomain import laplace_integral

__all__: list[str] = [
    # Construction
    "KernelSpec",
    "make_kernel",
    "symmetrize",
    "parse_kernel_spec",
    "kernel_from_text",
    # Quadrature
    "FourierQuadrature",
    "default_quadrature",
    "return_probability",
    "green_values",
    "laplacian_return",
    "singular_order",
    "laplace_integral",
    # Curves
    "return_curve",
    "default_grid",
    "fit_tail",
    "kernel_tail",
    # Profiles
    "KernelProfile",
    "ExponentialProfile",
    "CurveProfile",
    "FunctionProfile",
    "as_profile",
    "symmetrized_profile",
]
