"""Potential families, their vacua, and Taylor expansions.

Each family is a frozen dataclass exposing the potential and its first four
derivatives in closed form (``V``, ``dV``, ..., ``d4V``), all vectorised
over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import brentq

from .errors import FieldTheoryError, NoGapError, NoLocalMinimaError, UnsupportedFamilyError

# relative tolerance under which two minima count as degenerate
DEGENERACY_RTOL = 1e-13


@dataclass(frozen=True)
class Phi4:
    """Double well ``(lam/4) (phi^2 - phi0^2)^2``."""

    lam: float
    phi0: float

    def __post_init__(self) -> None:
        if not self.lam > 0 or not self.phi0 > 0:
            raise FieldTheoryError("Phi4 needs lam > 0 and phi0 > 0")

    @property
    def mu(self) -> float:
        return math.sqrt(self.lam) * self.phi0

    def V(self, phi):
        return 0.25 * self.lam * (phi * phi - self.phi0**2) ** 2

    def dV(self, phi):
        return self.lam * phi * (phi * phi - self.phi0**2)

    def d2V(self, phi):
        return self.lam * (3.0 * phi * phi - self.phi0**2)

    def d3V(self, phi):
        return 6.0 * self.lam * phi

    def d4V(self, phi):
        return 6.0 * self.lam + 0.0 * phi


@dataclass(frozen=True)
class DrivenSineGordon:
    """Tilted washboard ``A (1 - cos phi) + eps * phi + offset``."""

    A: float
    eps: float = 0.0
    offset: float = 0.0

    def __post_init__(self) -> None:
        if not self.A > 0:
            raise FieldTheoryError("DrivenSineGordon needs A > 0")
        if self.eps < 0:
            raise FieldTheoryError("DrivenSineGordon needs eps >= 0")

    def V(self, phi):
        return self.A * (1.0 - np.cos(phi)) + self.eps * phi + self.offset

    def dV(self, phi):
        return self.A * np.sin(phi) + self.eps

    def d2V(self, phi):
        return self.A * np.cos(phi)

    def d3V(self, phi):
        return -self.A * np.sin(phi)

    def d4V(self, phi):
        return -self.A * np.cos(phi)


@dataclass(frozen=True)
class Quadratic:
    """Harmonic well ``C0 (phi - center)^2``."""

    C0: float
    center: float = 0.0

    def V(self, phi):
        return self.C0 * (phi - self.center) ** 2

    def dV(self, phi):
        return 2.0 * self.C0 * (phi - self.center)

    def d2V(self, phi):
        return 2.0 * self.C0 + 0.0 * phi

    def d3V(self, phi):
        return 0.0 * phi

    def d4V(self, phi):
        return 0.0 * phi


@dataclass(frozen=True)
class Polynomial:
    """Taylor polynomial ``sum_k coeffs[k] (phi - center)^k`` of degree <= 4."""

    coeffs: tuple
    center: float = 0.0

    def __post_init__(self) -> None:
        c = tuple(float(v) for v in self.coeffs)
        if not 1 <= len(c) <= 5:
            raise FieldTheoryError("Polynomial supports degree 0..4")
        object.__setattr__(self, "coeffs", c + (0.0,) * (5 - len(c)))

    def _eval(self, phi, k: int):
        y = phi - self.center
        out = 0.0 * y
        for n in range(4, k - 1, -1):
            out = out * y + self.coeffs[n] * math.perm(n, k)
        return out

    def V(self, phi):
        return self._eval(phi, 0)

    def dV(self, phi):
        return self._eval(phi, 1)

    def d2V(self, phi):
        return self._eval(phi, 2)

    def d3V(self, phi):
        return self._eval(phi, 3)

    def d4V(self, phi):
        return self._eval(phi, 4)

    def as_phi4(self, odd_tol: float = 1e-12) -> tuple[Phi4, float, float]:
        """Rewrite an even quartic double well as ``(Phi4, center, constant)``.

        ``V(phi) == phi4.V(phi - center) + constant``. Needs ``c2 < 0 < c4``
        and odd coefficients below ``odd_tol`` relative to the even ones,
        which are then dropped (Taylor coefficients about a symmetric point
        carry roundoff such as ``sin(pi)``).
        """
        c0, c1, c2, c3, c4 = self.coeffs
        scale = max(abs(c2), abs(c4))
        odd = max(abs(c1), abs(c3))
        if odd > odd_tol * scale or not (c2 < 0.0 < c4):
            raise UnsupportedFamilyError(
                "only even quartics with c2 < 0 < c4 map onto Phi4"
            )
        phi4 = Phi4(lam=4.0 * c4, phi0=math.sqrt(-c2 / (2.0 * c4)))
        return phi4, self.center, c0 - c2 * c2 / (4.0 * c4)


PotentialSpec = Union[Phi4, DrivenSineGordon, Quadratic, Polynomial]


def evaluate(spec: PotentialSpec, phi, order: int = 0):
    """``V`` (order 0) or its ``order``-th derivative, up to 4."""
    fn = (spec.V, spec.dV, spec.d2V, spec.d3V, spec.d4V)[order]
    return fn(phi)


@dataclass(frozen=True)
class VacuumReport:
    phi_false: float
    phi_true: float
    V_false: float
    V_true: float
    gap: float


@dataclass(frozen=True)
class ExpansionCoeffs:
    """Taylor data of ``V`` about ``center``; ``base`` includes any supplied gradient energy."""

    center: float
    base: float
    c1: float
    c2: float
    c3: float
    c4: float


def _polish(spec: PotentialSpec, lo: float, hi: float) -> float:
    root = brentq(spec.dV, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    # Newton polish; keep the iterate with the smallest residual
    best, best_res = root, abs(spec.dV(root))
    x = root
    for _ in range(8):
        if best_res < 1e-14:
            break
        curv = spec.d2V(x)
        if curv == 0:
            break
        x = x - spec.dV(x) / curv
        res = abs(spec.dV(x))
        if res < best_res and lo <= x <= hi:
            best, best_res = x, res
    return float(best)


def find_minima(spec: PotentialSpec, interval, scan_points: int = 256) -> list[tuple[float, float]]:
    """Local minima of ``spec`` inside ``interval``, sorted by field value.

    A coarse scan of ``V'`` locates minus-to-plus sign changes, each bracket
    is solved by Brent's method and Newton-polished. Roots with ``V'' <= 0``
    are discarded. An empty list means no minimum in the interval.
    """
    lo, hi = map(float, interval)
    if not lo < hi:
        raise FieldTheoryError(f"need phi_lo < phi_hi, got {interval}")
    if scan_points < 16:
        raise FieldTheoryError("scan_points must be >= 16")
    xs = np.linspace(lo, hi, int(scan_points))
    d = spec.dV(xs)
    roots: list[float] = []
    for i in range(len(xs) - 1):
        if d[i] == 0.0:
            roots.append(float(xs[i]))
        elif d[i] < 0.0 < d[i + 1]:
            roots.append(_polish(spec, float(xs[i]), float(xs[i + 1])))
    if d[-1] == 0.0:
        roots.append(float(xs[-1]))

    minima: list[tuple[float, float]] = []
    for r in sorted(roots):
        if spec.d2V(r) <= 0.0:
            continue
        if minima and abs(r - minima[-1][0]) < 1e-9 * max(1.0, abs(r)):
            continue
        minima.append((r, float(spec.V(r))))
    return minima


def classify_vacua(spec: PotentialSpec, interval, scan_points: int = 256) -> VacuumReport:
    """Label the false (higher) and true (lower) minima and their energy gap.

    With more than two minima the lowest one is the true vacuum and its
    nearest neighbour in field value is the false vacuum. Degenerate wells
    give ``gap == 0`` with the smaller field value labelled true.
    """
    if isinstance(spec, DrivenSineGordon) and spec.eps >= spec.A:
        raise NoLocalMinimaError(
            f"no local minima: tilt eps={spec.eps} must stay below A={spec.A}"
        )
    minima = find_minima(spec, interval, scan_points)
    if len(minima) < 2:
        raise NoGapError(f"found {len(minima)} minima in {tuple(interval)}, need two")

    true_idx = min(range(len(minima)), key=lambda i: (minima[i][1], minima[i][0]))
    neighbours = [i for i in (true_idx - 1, true_idx + 1) if 0 <= i < len(minima)]
    false_idx = min(
        neighbours,
        key=lambda i: (abs(minima[i][0] - minima[true_idx][0]), -minima[i][1]),
    )
    (phi_t, v_t), (phi_f, v_f) = minima[true_idx], minima[false_idx]
    scale = max(1.0, abs(v_t), abs(v_f))
    if abs(v_f - v_t) <= DEGENERACY_RTOL * scale:
        (phi_t, v_t), (phi_f, v_f) = sorted([minima[true_idx], minima[false_idx]])
        gap = 0.0
    else:
        gap = v_f - v_t
    return VacuumReport(phi_f, phi_t, v_f, v_t, gap)


def quadratic_expansion(spec: PotentialSpec, phi_c: float, gradient_energy: float = 0.0) -> ExpansionCoeffs:
    """Closed-form Taylor coefficients of ``V`` about ``phi_c``.

    ``base`` is the Euclidean Lagrangian at the expansion point, i.e.
    ``V(phi_c)`` plus whatever static gradient energy the caller supplies.
    """
    return ExpansionCoeffs(
        center=float(phi_c),
        base=float(spec.V(phi_c)) + gradient_energy,
        c1=float(spec.dV(phi_c)),
        c2=float(spec.d2V(phi_c)) / 2.0,
        c3=float(spec.d3V(phi_c)) / 6.0,
        c4=float(spec.d4V(phi_c)) / 24.0,
    )


def phi4_roundoff(spec: DrivenSineGordon, phi_c: float) -> Polynomial:
    """Quartic Taylor truncation of a washboard potential about ``phi_c``."""
    if not isinstance(spec, DrivenSineGordon):
        raise UnsupportedFamilyError("phi4_roundoff expects a DrivenSineGordon spec")
    e = quadratic_expansion(spec, phi_c)
    return Polynomial((float(spec.V(phi_c)), e.c1, e.c2, e.c3, e.c4), center=float(phi_c))
