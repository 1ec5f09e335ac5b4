"""Tunneling matrix elements and current densities.

Two matrix elements live here:

* the Bardeen element for a particle crossing a rectangular barrier, built
  from the exact evanescent solutions of the two isolated electrodes, and
* its field-theory counterpart between two Gaussian wave functionals,
  with the barrier surface replaced by a step function at a trajectory
  φ₀(x) lying between the two centre configurations.

Natural units, ħ = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

import numpy as np
from scipy.integrate import quad

from .errors import (
    FieldTheoryError,
    GridMismatchError,
    NoBarrierError,
    NormalizationError,
    SurfacePlacementError,
    TrajectoryPlacementError,
)
from .lattice import FieldConfig
from .wavefunctionals import GaussianFunctional, is_normalized


class Regime(str, Enum):
    COHERENT = "coherent_boson"
    INCOHERENT = "incoherent_quasiparticle"

    @classmethod
    def parse(cls, value) -> "Regime":
        if isinstance(value, Regime):
            return value
        aliases = {"coherent": cls.COHERENT, "incoherent": cls.INCOHERENT}
        if value in aliases:
            return aliases[value]
        return cls(value)


@dataclass(frozen=True)
class BarrierSpec:
    """Rectangular barrier of height ``V0`` on ``[x_a, x_b]`` for a particle of energy ``E``."""

    x_a: float
    x_b: float
    V0: float
    E: float
    m: float = 1.0

    def __post_init__(self) -> None:
        if not self.x_a < self.x_b:
            raise FieldTheoryError("need x_a < x_b")
        if not (self.V0 > 0 and self.m > 0):
            raise FieldTheoryError("need V0 > 0 and m > 0")
        if not self.E > 0:
            raise FieldTheoryError("need a positive particle energy")
        if self.E >= self.V0:
            raise NoBarrierError(f"E = {self.E} is not below the barrier height {self.V0}")

    @property
    def width(self) -> float:
        return self.x_b - self.x_a

    @property
    def k(self) -> float:
        return math.sqrt(2.0 * self.m * self.E)

    @property
    def kappa(self) -> float:
        return math.sqrt(2.0 * self.m * (self.V0 - self.E))

    @property
    def velocity(self) -> float:
        return self.k / self.m


@dataclass(frozen=True)
class TunnelingResult:
    T: float
    J: float
    regime: Regime
    surface: object = None


def _evanescent_amplitude(b: BarrierSpec) -> complex:
    # unit-flux incoming wave fully reflected by a semi-infinite barrier
    return 2.0 * b.k / (b.k + 1j * b.kappa) / math.sqrt(b.velocity)


def left_state(b: BarrierSpec, x: float) -> tuple[complex, complex]:
    """ψ_k and dψ_k/dx inside the barrier for the isolated left electrode."""
    psi = _evanescent_amplitude(b) * math.exp(-b.kappa * (x - b.x_a))
    return psi, -b.kappa * psi


def right_state(b: BarrierSpec, x: float) -> tuple[complex, complex]:
    """ψ_q and dψ_q/dx inside the barrier for the isolated right electrode."""
    psi = _evanescent_amplitude(b) * math.exp(b.kappa * (x - b.x_b))
    return psi, b.kappa * psi


def bardeen_matrix_element(barrier: BarrierSpec, x0: Optional[float] = None) -> float:
    """Bardeen element ``-(1/2m) [ψ_k* ψ_q' - ψ_q ψ_k*']`` evaluated at ``x0``.

    ``x0`` defaults to the barrier midpoint and must lie strictly inside.
    """
    if x0 is None:
        x0 = 0.5 * (barrier.x_a + barrier.x_b)
    if not barrier.x_a < x0 < barrier.x_b:
        raise SurfacePlacementError(
            f"surface x0 = {x0} must lie inside ({barrier.x_a}, {barrier.x_b})"
        )
    pk, dpk = left_state(barrier, x0)
    pq, dpq = right_state(barrier, x0)
    current = pk.conjugate() * dpq - pq * dpk.conjugate()
    return float((-current / (2.0 * barrier.m)).real)


def lorentzian(x, eta: float):
    return (eta / math.pi) / (np.square(x) + eta * eta)


def golden_rule_rate(elements: Iterable, broadening: float) -> float:
    """``2π Σ |T_kq|² δ_η(E_k - E_q)`` with a normalised Lorentzian of width ``broadening``."""
    if not broadening > 0:
        raise FieldTheoryError("broadening must be positive")
    arr = np.asarray(list(elements), dtype=complex).reshape(-1, 3)
    if arr.size == 0:
        return 0.0
    T, Ek, Eq = arr[:, 0], arr[:, 1].real, arr[:, 2].real
    return float(2.0 * math.pi * np.sum(np.abs(T) ** 2 * lorentzian(Ek - Eq, broadening)))


def golden_rule_transmission(
    barrier: BarrierSpec,
    x0: Optional[float] = None,
    broadening: Optional[float] = None,
    window: float = 2000.0,
    per_width: int = 10,
) -> float:
    """Transmission probability from the golden rule with a discretised right electrode.

    Right-electrode states at energies ``E + j ΔE`` each carry the matrix
    element ``T sqrt(ρ ΔE)``, where ρ = 1/(2π) is the density of states of
    unit-flux scattering states; the constant-matrix-element approximation
    is used across the ``±window·η`` energy shell.
    """
    T = bardeen_matrix_element(barrier, x0)
    eta = broadening if broadening is not None else 1e-6 * barrier.E
    dE = eta / per_width
    n = int(window * per_width)
    offsets = np.arange(-n, n + 1) * dE
    weight = math.sqrt(dE / (2.0 * math.pi))
    elements = np.column_stack([
        np.full(offsets.size, T * weight), np.full(offsets.size, barrier.E), barrier.E + offsets,
    ])
    return golden_rule_rate(elements, eta)


def current_density(T: float, regime="coherent_boson", kappa_J: float = 1.0) -> float:
    """``kappa_J |T|`` for coherent boson transfer, ``kappa_J |T|²`` for quasiparticles."""
    regime = Regime.parse(regime)
    if regime is Regime.COHERENT:
        return kappa_J * abs(T)
    return kappa_J * abs(T) ** 2


def tunneling_result(T: float, regime="coherent_boson", kappa_J: float = 1.0, surface=None) -> TunnelingResult:
    regime = Regime.parse(regime)
    return TunnelingResult(T, current_density(T, regime, kappa_J), regime, surface)


# -- functional matrix element ---------------------------------------------


def step(phi, phi0):
    """Sitewise barrier step ϑ(φ - φ₀), right-continuous."""
    return np.asarray(phi >= phi0, dtype=float)


def midpoint_trajectory(psi_i: GaussianFunctional, psi_f: GaussianFunctional) -> np.ndarray:
    return 0.5 * (psi_i.center + psi_f.center)


def _check_pair(psi_i: GaussianFunctional, psi_f: GaussianFunctional) -> None:
    if psi_i.n_sites != psi_f.n_sites or psi_i.dx != psi_f.dx:
        raise GridMismatchError("functionals live on different lattices")
    if psi_i.grid is not None and psi_f.grid is not None and psi_i.grid != psi_f.grid:
        raise GridMismatchError("functionals live on different grids")
    for psi in (psi_i, psi_f):
        if not is_normalized(psi):
            raise NormalizationError("functional matrix element needs normalised functionals")


def _trajectory_values(psi_i, psi_f, trajectory) -> np.ndarray:
    if trajectory is None:
        return midpoint_trajectory(psi_i, psi_f)
    if isinstance(trajectory, FieldConfig):
        if psi_i.grid is not None and trajectory.grid != psi_i.grid:
            raise GridMismatchError("trajectory grid differs from the functionals")
        values = trajectory.values
    else:
        values = np.asarray(trajectory, dtype=float)
        if values.ndim == 0:
            values = np.full(psi_i.center.shape, float(values))
    if values.shape != psi_i.center.shape:
        raise GridMismatchError("trajectory length does not match the lattice")
    return np.asarray(values, dtype=float)


def _site_integrals(a_i, c_i, a_f, c_f, phi0, dx) -> tuple[float, float, float]:
    """Log of the normalised half-line overlap and the ratio of the Laplacian term to it.

    With g = exp(-a_i (φ-c_i)²), h = exp(-a_f (φ-c_f)²) and n the product of
    their normalisation constants, returns ``(log(n S), D/S)`` where
    ``S = ∫_{φ0}^∞ g h`` and ``D = ∫_{φ0}^∞ (g h'' - h g'')``.
    """
    A = a_i + a_f
    mid = (a_i * c_i + a_f * c_f) / A
    d = c_f - c_i
    shift = a_i * a_f * d * d / A  # g h = exp(-A (φ-mid)² - shift)
    log_n = 0.25 * math.log(2.0 * a_i / math.pi) + 0.25 * math.log(2.0 * a_f / math.pi)
    sigma = 1.0 / math.sqrt(2.0 * A)
    upper = 40.0 * sigma
    lower = max(phi0 - mid, -upper)  # integrate in u = φ - mid
    if lower >= upper:
        return -math.inf, 0.0

    # g h'' - h g'' = (p2 u² + p1 u + p0) g h, expanded so no large terms cancel
    b_f, b_i = mid - c_f, mid - c_i
    p2 = 4.0 * (a_f * a_f - a_i * a_i)
    p1 = 8.0 * (a_f * a_f * b_f - a_i * a_i * b_i)
    p0 = 4.0 * (a_f * a_f * b_f * b_f - a_i * a_i * b_i * b_i) - 2.0 * (a_f - a_i)

    # split at the peak so every piece has a definite sign and relative tolerance is reachable
    pieces = [(lower, 0.0), (0.0, upper)] if lower < 0.0 else [(lower, upper)]
    moments = [
        sum(
            quad(lambda u, k=k: u**k * math.exp(-A * u * u), lo, hi, epsabs=0.0, epsrel=1e-12, limit=400)[0]
            for lo, hi in pieces
        )
        for k in range(3)
    ]
    S = moments[0]
    if S <= 0.0:
        return -math.inf, 0.0
    D = p2 * moments[2] + p1 * moments[1] + p0 * S
    return log_n + math.log(S) - shift, D / S


def _factorized_terms(psi_i, psi_f, phi0):
    a_i, a_f = psi_i.site_weights, psi_f.site_weights
    cache: dict = {}
    log_s = np.empty(psi_i.n_sites)
    ratio = np.empty(psi_i.n_sites)
    for j in range(psi_i.n_sites):
        key = (a_i[j], psi_i.center[j], a_f[j], psi_f.center[j], phi0[j])
        if key not in cache:
            cache[key] = _site_integrals(*key, psi_i.dx)
        log_s[j], ratio[j] = cache[key]
    return log_s, ratio


def functional_matrix_element(
    psi_i: GaussianFunctional,
    psi_f: GaussianFunctional,
    trajectory=None,
    mu: float = 1.0,
    *,
    check_trajectory: bool = True,
) -> float:
    """Tunneling matrix element between two Gaussian wave functionals.

    Computes

        T_if = (1/2μ) ∫∏dφ_i [Ψ_i Σ_j δ²Ψ_f/δφ_j² - Ψ_f Σ_j δ²Ψ_i/δφ_j²] ∏_i ϑ(φ_i - φ₀_i)

    with the sitewise step function. For diagonal Gaussians the integral
    factorises into one-dimensional half-line integrals per site, each done
    by adaptive quadrature and combined in log space:

        T_if = (1/(2μ Δx²)) ∏_k (n_k S_k) Σ_j D_j / S_j.

    ``trajectory`` defaults to the midpoint configuration. With
    ``check_trajectory`` it must lie between the two centres at every site.
    """
    if not mu > 0:
        raise FieldTheoryError("inertia mu must be positive")
    _check_pair(psi_i, psi_f)
    phi0 = _trajectory_values(psi_i, psi_f, trajectory)
    if check_trajectory:
        lo = np.minimum(psi_i.center, psi_f.center)
        hi = np.maximum(psi_i.center, psi_f.center)
        tol = 1e-12 * np.maximum(1.0, np.abs(phi0))
        if np.any(phi0 < lo - tol) or np.any(phi0 > hi + tol):
            j = int(np.flatnonzero((phi0 < lo - tol) | (phi0 > hi + tol))[0])
            raise TrajectoryPlacementError(
                f"trajectory value {phi0[j]:.6g} at site {j} lies outside "
                f"[{lo[j]:.6g}, {hi[j]:.6g}] between the two centres"
            )
    log_s, ratio = _factorized_terms(psi_i, psi_f, phi0)
    total = float(np.sum(ratio))
    log_prod = float(np.sum(log_s))
    if total == 0.0 or log_prod == -math.inf:
        return 0.0
    return math.copysign(math.exp(log_prod + math.log(abs(total))), total) / (2.0 * mu * psi_i.dx**2)


def log_abs_matrix_element(
    psi_i: GaussianFunctional,
    psi_f: GaussianFunctional,
    trajectory=None,
    mu: float = 1.0,
) -> float:
    """``log |T_if|`` without the final exponentiation, for very large lattices."""
    _check_pair(psi_i, psi_f)
    phi0 = _trajectory_values(psi_i, psi_f, trajectory)
    log_s, ratio = _factorized_terms(psi_i, psi_f, phi0)
    total = float(np.sum(ratio))
    if total == 0.0:
        return -math.inf
    return float(np.sum(log_s)) + math.log(abs(total)) - math.log(2.0 * mu * psi_i.dx**2)
