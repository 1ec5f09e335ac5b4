"""Independent reference computations used to cross-check the main code paths.

None of these reuse the factorised or closed-form routines they are meant to
check: the transfer matrix solves the scattering problem directly and the
tensor quadratures integrate the full multi-site integrands on product grids.
"""

from __future__ import annotations

import math

import numpy as np

from .wavefunctionals import GaussianFunctional


def transfer_matrix_transmission(E: float, edges, heights, m: float = 1.0) -> float:
    """Transmission probability through a piecewise-constant potential.

    ``edges`` are the interface positions and ``heights`` the potential in
    each of the ``len(edges) + 1`` regions; the outer regions must be
    classically allowed and at equal height.
    """
    heights = [float(v) for v in heights]
    if len(heights) != len(edges) + 1:
        raise ValueError("need one more region than interfaces")
    if heights[0] != heights[-1] or E <= heights[0]:
        raise ValueError("outer regions must be equal and classically allowed")
    q = [np.sqrt(complex(2.0 * m * (E - v))) for v in heights]

    def plane(qn, x):
        e_plus, e_minus = np.exp(1j * qn * x), np.exp(-1j * qn * x)
        return np.array([[e_plus, e_minus], [1j * qn * e_plus, -1j * qn * e_minus]])

    M = np.eye(2, dtype=complex)
    for n, x in enumerate(edges):
        M = np.linalg.solve(plane(q[n + 1], x), plane(q[n], x)) @ M
    t = np.linalg.det(M) / M[1, 1]
    return float(abs(t) ** 2)


def rectangular_transmission(barrier) -> float:
    return transfer_matrix_transmission(
        barrier.E, [barrier.x_a, barrier.x_b], [0.0, barrier.V0, 0.0], barrier.m
    )


def _gauss_legendre(lo: float, hi: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def _site_ranges(psi_i: GaussianFunctional, psi_f: GaussianFunctional, phi0, n_sigma: float):
    ranges = []
    for j in range(psi_i.n_sites):
        a = min(psi_i.site_weights[j], psi_f.site_weights[j])
        sigma = 1.0 / math.sqrt(2.0 * a)
        lo = min(psi_i.center[j], psi_f.center[j]) - n_sigma * sigma
        hi = max(psi_i.center[j], psi_f.center[j]) + n_sigma * sigma
        if phi0 is not None:
            lo = max(lo, float(phi0[j]))
        ranges.append((lo, hi))
    return ranges


def _mesh(ranges, nodes: int):
    grids = []
    weights = []
    for lo, hi in ranges:
        x, w = _gauss_legendre(lo, hi, nodes)
        grids.append(x)
        weights.append(w)
    X = np.meshgrid(*grids, indexing="ij")
    W = np.ones_like(X[0])
    for j, w in enumerate(weights):
        shape = [1] * len(ranges)
        shape[j] = -1
        W = W * w.reshape(shape)
    return X, W


def _gaussian_and_laplacian(psi: GaussianFunctional, X):
    a = psi.site_weights
    c = np.prod((2.0 * a / math.pi) ** 0.25)
    expo = np.zeros_like(X[0])
    lap_poly = np.zeros_like(X[0])
    for j, Xj in enumerate(X):
        y = Xj - psi.center[j]
        expo -= a[j] * y * y
        lap_poly += 4.0 * a[j] ** 2 * y * y - 2.0 * a[j]
    value = c * np.exp(expo)
    return value, lap_poly * value / psi.dx**2


def brute_force_matrix_element(
    psi_i: GaussianFunctional,
    psi_f: GaussianFunctional,
    trajectory,
    mu: float = 1.0,
    nodes: int = 80,
    n_sigma: float = 6.0,
) -> float:
    """Matrix element by tensor-product Gauss-Legendre quadrature over all sites at once.

    Each site is integrated over ``[max(φ₀_j, lower), upper]`` spanning both
    centres by ``n_sigma`` amplitude widths. Meant for N <= 3.
    """
    phi0 = np.broadcast_to(np.asarray(trajectory, dtype=float), psi_i.center.shape)
    ranges = _site_ranges(psi_i, psi_f, phi0, n_sigma)
    if any(lo >= hi for lo, hi in ranges):
        return 0.0
    X, W = _mesh(ranges, nodes)
    gi, lap_i = _gaussian_and_laplacian(psi_i, X)
    gf, lap_f = _gaussian_and_laplacian(psi_f, X)
    integrand = gi * lap_f - gf * lap_i
    return float(np.sum(W * integrand)) / (2.0 * mu)


def brute_force_norm(psi: GaussianFunctional, nodes: int = 80, n_sigma: float = 10.0) -> float:
    """∫∏dφ_i |Ψ|² by tensor quadrature, using the functional's own constant."""
    ranges = _site_ranges(psi, psi, None, n_sigma)
    X, W = _mesh(ranges, nodes)
    expo = np.zeros_like(X[0])
    for j, Xj in enumerate(X):
        expo -= psi.site_weights[j] * (Xj - psi.center[j]) ** 2
    return float(np.sum(W * np.exp(2.0 * (psi.log_norm + expo))))


def _random_pair(rng: np.random.Generator, n: int):
    from .wavefunctionals import functional_from_sites, normalize

    dx = float(rng.uniform(0.2, 1.0))
    c_i = rng.uniform(-1.0, 1.0, n)
    c_f = c_i + rng.uniform(0.3, 1.5, n) * rng.choice([-1.0, 1.0], n)
    psi_i = normalize(functional_from_sites(c_i, rng.uniform(0.5, 3.0, n), dx))
    psi_f = normalize(functional_from_sites(c_f, rng.uniform(0.5, 3.0, n), dx))
    return psi_i, psi_f


def run_selftest(seed: int = 0, draws: int = 5) -> list[tuple[str, bool, str]]:
    """Cross-check the fast paths against the oracles above on small lattices.

    Returns ``(name, passed, detail)`` triples.
    """
    from .tunneling import BarrierSpec, functional_matrix_element, golden_rule_transmission, midpoint_trajectory

    rng = np.random.default_rng(seed)
    results = []
    for n in (2, 3):
        worst_t = worst_norm = worst_anti = 0.0
        for _ in range(draws):
            psi_i, psi_f = _random_pair(rng, n)
            traj = midpoint_trajectory(psi_i, psi_f)
            fast = functional_matrix_element(psi_i, psi_f, traj)
            slow = brute_force_matrix_element(psi_i, psi_f, traj, nodes=60 if n == 3 else 100)
            worst_t = max(worst_t, abs(fast - slow) / abs(slow))
            worst_norm = max(worst_norm, abs(brute_force_norm(psi_i) - 1.0))
            back = functional_matrix_element(psi_f, psi_i, traj)
            worst_anti = max(worst_anti, abs(fast + back) / abs(fast))
        results.append((f"matrix element N={n}", worst_t < 1e-6, f"max rel err {worst_t:.3g}"))
        results.append((f"normalisation N={n}", worst_norm < 1e-10, f"max |norm-1| {worst_norm:.3g}"))
        results.append((f"antisymmetry N={n}", worst_anti < 1e-12, f"max rel {worst_anti:.3g}"))
    worst_b = 0.0
    for _ in range(draws):
        V0 = float(rng.uniform(2.0, 4.0))
        E = float(rng.uniform(0.3, 0.7)) * V0
        w = 6.0 / math.sqrt(2.0 * (V0 - E))
        b = BarrierSpec(0.0, w, V0, E)
        exact = rectangular_transmission(b)
        worst_b = max(worst_b, abs(golden_rule_transmission(b) - exact) / exact)
    results.append(("bardeen vs transfer matrix", worst_b < 0.05, f"max rel err {worst_b:.3g}"))
    return results
