"""Lattice Gaussian wave functionals.

A functional on N lattice sites with spacing Δx is

    Ψ[φ] = c · exp(-Σ_i α_i Δx (φ_i - center_i)²),

the lattice transcription of ``c exp(-∫dx α(x) (φ(x) - φ_c(x))²)``. Field
integrals use the product measure ∏_i dφ_i, and a functional derivative
with respect to φ(x_i) is ``(1/Δx) ∂/∂φ_i`` so that δφ(x)/δφ(y) carries
the lattice delta function 1/Δx. Natural units throughout (ħ = 1).

Normalisation constants are kept as logarithms because products of
per-site factors over a few hundred sites leave the double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import (
    CollapsedWidthError,
    DegenerateVacuumError,
    FieldTheoryError,
    GridMismatchError,
    NormalizationError,
    UnstableExpansionError,
)
from .lattice import (
    FieldConfig,
    Grid,
    check_same_grid,
    derivative,
    derivative_variance,
    integrate,
    second_derivative,
)
from .potentials import DrivenSineGordon, PotentialSpec


@dataclass(frozen=True, eq=False)
class GaussianFunctional:
    center: np.ndarray
    width: np.ndarray
    dx: float
    reference: Optional[np.ndarray] = None
    log_norm: float = 0.0
    grid: Optional[Grid] = None

    def __post_init__(self) -> None:
        center = np.array(self.center, dtype=float)
        width = np.broadcast_to(np.asarray(self.width, dtype=float), center.shape).copy()
        if center.ndim != 1 or center.size == 0:
            raise FieldTheoryError("center must be a non-empty 1D array")
        if not np.all(np.isfinite(center)):
            raise FieldTheoryError("center must be finite")
        if not (np.all(np.isfinite(width)) and np.all(width > 0)):
            raise FieldTheoryError("widths must be finite and strictly positive")
        if not self.dx > 0:
            raise FieldTheoryError("lattice spacing must be positive")
        if self.grid is not None and self.grid.n_points != center.size:
            raise GridMismatchError("center length does not match the grid")
        for arr in (center, width):
            arr.flags.writeable = False
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "width", width)
        if self.reference is not None:
            ref = np.array(self.reference, dtype=float)
            if ref.shape != center.shape:
                raise GridMismatchError("reference length does not match the center")
            ref.flags.writeable = False
            object.__setattr__(self, "reference", ref)

    @property
    def n_sites(self) -> int:
        return self.center.size

    @property
    def site_weights(self) -> np.ndarray:
        """Per-site exponent coefficients ``a_i = α_i Δx``."""
        return self.width * self.dx

    @property
    def norm_const(self) -> float:
        return math.exp(self.log_norm)

    def anchor_exponent(self) -> float:
        """``Σ α_i Δx (center_i - reference_i)²``, the exponent at the classical configuration."""
        if self.reference is None:
            return 0.0
        return float(np.sum(self.site_weights * (self.center - self.reference) ** 2))


def build_functional(center: FieldConfig, reference: Optional[FieldConfig], width) -> GaussianFunctional:
    """Unnormalised (``c = 1``) Gaussian functional centred on ``center``."""
    if reference is not None:
        check_same_grid(center, reference)
    width = np.asarray(width.values if isinstance(width, FieldConfig) else width, dtype=float)
    if width.ndim and width.shape != center.values.shape:
        raise GridMismatchError("width profile does not match the grid")
    return GaussianFunctional(
        center=center.values,
        width=width,
        dx=center.grid.spacing,
        reference=None if reference is None else reference.values,
        grid=center.grid,
    )


def functional_from_sites(center, width, dx: float, reference=None) -> GaussianFunctional:
    """Functional on a bare lattice of ``len(center)`` sites (any N >= 1)."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    grid = None
    if center.size >= 3:
        grid = Grid(0.0, (center.size - 1) * dx, center.size)
    return GaussianFunctional(center, width, float(dx), reference, 0.0, grid)


def _log_norm(psi: GaussianFunctional) -> float:
    return float(np.sum(0.25 * np.log(2.0 * psi.site_weights / math.pi)))


def normalize(psi: GaussianFunctional) -> GaussianFunctional:
    """Set ``c = ∏_i (2 α_i Δx / π)^(1/4)`` so that ∫∏dφ_i |Ψ|² = 1."""
    return replace(psi, log_norm=_log_norm(psi))


def is_normalized(psi: GaussianFunctional, tol: float = 1e-10) -> bool:
    return abs(psi.log_norm - _log_norm(psi)) <= tol


def _require_normalized(psi: GaussianFunctional) -> None:
    if not is_normalized(psi):
        raise NormalizationError("functional must be normalised first")


def _site_values(psi: GaussianFunctional, phi) -> np.ndarray:
    if isinstance(phi, FieldConfig):
        if psi.grid is not None and phi.grid != psi.grid:
            raise GridMismatchError(f"field grid {phi.grid} differs from {psi.grid}")
        values = phi.values
    else:
        values = np.asarray(phi, dtype=float)
    if values.shape != psi.center.shape:
        raise GridMismatchError(
            f"expected {psi.n_sites} site values, got shape {values.shape}"
        )
    return values


def log_evaluate(psi: GaussianFunctional, phi) -> float:
    y = _site_values(psi, phi) - psi.center
    return psi.log_norm - float(np.sum(psi.site_weights * y * y))


def evaluate(psi: GaussianFunctional, phi) -> float:
    return math.exp(log_evaluate(psi, phi))


def _check_site(psi: GaussianFunctional, i: int) -> int:
    if not -psi.n_sites <= i < psi.n_sites:
        raise IndexError(f"site {i} out of range for {psi.n_sites} sites")
    return i % psi.n_sites


def functional_derivative(psi: GaussianFunctional, phi, i: int) -> float:
    """δΨ/δφ(x_i) = -2 α_i (φ_i - center_i) Ψ[φ]."""
    i = _check_site(psi, i)
    values = _site_values(psi, phi)
    return -2.0 * psi.width[i] * (values[i] - psi.center[i]) * evaluate(psi, values)


def second_functional_derivative(psi: GaussianFunctional, phi, i: int) -> float:
    """δ²Ψ/δφ(x_i)² = (1/Δx²) ∂²Ψ/∂φ_i²."""
    i = _check_site(psi, i)
    values = _site_values(psi, phi)
    a = psi.site_weights[i]
    y = values[i] - psi.center[i]
    return (4.0 * a * a * y * y - 2.0 * a) / psi.dx**2 * evaluate(psi, values)


def functional_laplacian(psi: GaussianFunctional, phi) -> float:
    """Σ_j δ²Ψ/δφ(x_j)², the operator shared by the Hamiltonian and the matrix element."""
    values = _site_values(psi, phi)
    a = psi.site_weights
    y = values - psi.center
    return float(np.sum(4.0 * a * a * y * y - 2.0 * a)) / psi.dx**2 * evaluate(psi, values)


def _gradient_squared(psi: GaussianFunctional, values: np.ndarray) -> np.ndarray:
    if psi.grid is None:
        raise FieldTheoryError("gradient terms need a lattice of at least 3 sites")
    return derivative(FieldConfig(psi.grid, values)).values ** 2


def apply_hamiltonian(
    psi: GaussianFunctional,
    spec: PotentialSpec,
    phi,
    m: float = 1.0,
    gradient: bool = True,
) -> float:
    """(HΨ)[φ] for H = Σ_i Δx [-(1/2m) δ²/δφ_i² + ½(∇φ)_i² + V(φ_i)].

    ``gradient=False`` drops the ½(∇φ)² coupling between neighbouring sites.
    """
    if not m > 0:
        raise FieldTheoryError("inertia m must be positive")
    values = _site_values(psi, phi)
    local = spec.V(values)
    if gradient:
        local = local + 0.5 * _gradient_squared(psi, values)
    kinetic = -0.5 / m * functional_laplacian(psi, values)
    return psi.dx * (kinetic + float(np.sum(local)) * evaluate(psi, values))


def _expected_potential(spec: PotentialSpec, center: np.ndarray, var: np.ndarray) -> np.ndarray:
    if isinstance(spec, DrivenSineGordon):
        return (
            spec.A * (1.0 - np.cos(center) * np.exp(-0.5 * var))
            + spec.eps * center
            + spec.offset
        )
    # the remaining families are polynomials of degree <= 4
    return spec.V(center) + 0.5 * spec.d2V(center) * var + 0.125 * spec.d4V(center) * var * var


def energy_expectation(
    psi: GaussianFunctional,
    spec: PotentialSpec,
    m: float = 1.0,
    gradient: bool = True,
) -> float:
    """⟨Ψ|H|Ψ⟩ from closed-form Gaussian moments.

    Per site the field fluctuation has variance 1/(4 α_i Δx); the potential
    average is exact for all families (polynomial moments up to fourth
    order, or the cosine characteristic function for the washboard).
    """
    _require_normalized(psi)
    if not m > 0:
        raise FieldTheoryError("inertia m must be positive")
    a = psi.site_weights
    var = 1.0 / (4.0 * a)
    kinetic = float(np.sum(psi.width)) / (2.0 * m)
    potential = psi.dx * float(np.sum(_expected_potential(spec, psi.center, var)))
    total = kinetic + potential
    if gradient:
        grad2 = _gradient_squared(psi, psi.center) + derivative_variance(psi.grid, var)
        total += 0.5 * psi.dx * float(np.sum(grad2))
    return total


def stationarity_residual(center: FieldConfig, spec: PotentialSpec) -> float:
    """Max-norm of the static field equation ``-φ'' + V'(φ)`` over interior points."""
    lap = second_derivative(center).values
    res = -lap + spec.dV(center.values)
    return float(np.max(np.abs(res[1:-1])))


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Ground-state kernel f_xy, stored by its diagonal (off-diagonal couplings are zero)."""

    grid: Grid
    diagonal: np.ndarray

    def as_matrix(self) -> np.ndarray:
        return np.diag(self.diagonal)

    @property
    def widths(self) -> np.ndarray:
        return self.diagonal


def ground_state_kernel(spec: PotentialSpec, center: FieldConfig, m: float = 1.0) -> KernelMatrix:
    """Diagonal kernel ``f_xx = ½ sqrt(m V''(center(x)))``.

    This is the width of the exact harmonic ground state of each site when
    the sites are decoupled; with ``m = 1`` it reads ½ sqrt(V'').
    """
    curvature = spec.d2V(center.values)
    if np.any(curvature <= 0):
        bad = center.x[int(np.argmax(curvature <= 0))]
        raise UnstableExpansionError(
            f"V'' <= 0 at x = {bad:.6g}; no Gaussian kernel there"
        )
    diag = 0.5 * np.sqrt(m * curvature)
    diag.flags.writeable = False
    return KernelMatrix(center.grid, diag)


def alpha_from_gap(gap: float, alpha_constant: float = 1.0, length_constant: float = 1.0) -> tuple[float, float]:
    """Gaussian width and pair separation from the vacuum energy gap.

    ``alpha = alpha_constant * gap`` and ``L = length_constant / gap``.
    """
    if gap < 0:
        raise FieldTheoryError(f"energy gap must be non-negative, got {gap}")
    if gap == 0:
        raise DegenerateVacuumError("zero energy gap: degenerate vacua have no finite pair separation")
    return alpha_constant * gap, length_constant / gap


def width_shift(alpha: float, phi_0: float, phi_c: float, C2: float) -> tuple[float, float]:
    """Quartic correction to the Gaussian width.

    Returns ``(dV, alpha_tilde)`` with ``dV = -4 C2 phi_0 phi_c`` and
    ``alpha_tilde = alpha - |dV|``.
    """
    dV = -4.0 * C2 * phi_0 * phi_c
    alpha_tilde = alpha - abs(dV)
    if not alpha_tilde > 0:
        raise CollapsedWidthError(
            f"|dV| = {abs(dV):.6g} exceeds alpha = {alpha:.6g}; width would collapse"
        )
    return dV, alpha_tilde


def overlap_exponent_integrals(
    profile: FieldConfig, reference: FieldConfig, alpha: float, alpha_tilde: float
) -> tuple[float, float]:
    """``(alpha, alpha_tilde) * ∫dx (profile - reference)²`` by the trapezoidal rule."""
    check_same_grid(profile, reference)
    if not (alpha > 0 and alpha_tilde > 0):
        raise FieldTheoryError("widths must be positive")
    s = integrate(profile.with_values((profile.values - reference.values) ** 2))
    return alpha * s, alpha_tilde * s


def gap_quadratic_term(phi, phi_c, gap: float):
    """½ (φ - φ_c)² · 2ΔE_gap."""
    return 0.5 * (phi - phi_c) ** 2 * (2.0 * gap)


def expanded_lagrangian(phi, phi_c, gap: float, base: float = 0.0, quartic: float = 0.0, charge: float = 0.0):
    """Euclidean Lagrangian expanded about φ_c with the curvature fixed by the gap.

    ``base + |charge| + quartic (φ² - φ_c²)² + gap_quadratic_term``; with
    non-negative ``base`` and ``quartic`` it never drops below the quadratic term.
    """
    return (
        base
        + abs(charge)
        + quartic * (phi * phi - phi_c * phi_c) ** 2
        + gap_quadratic_term(phi, phi_c, gap)
    )
