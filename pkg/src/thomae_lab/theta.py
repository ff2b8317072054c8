"""Riemann theta constants with half-period characteristics and their
derivative tensors at v = 0, by truncated lattice summation.

The series is summed in the shifted form

    theta[eps](v; tau) = sum_{n in Z^g} exp( i pi q^t tau q + 2 i pi q^t (v + eps/2) ),
    q = n + eps'/2,

whose m-th v-derivative at 0 carries the polynomial prefactor
prod_i (2 pi i q_{n_i}).  Terms are kept inside the ellipsoid
||L q|| <= R with L the Cholesky factor of pi Im(tau); the radius is chosen
from a Gaussian tail estimate so the absolute truncation error stays below
the requested tolerance.  All points with a common eps' share the quadratic
part of the summand, so the engine caches (q, exp(i pi q^t tau q)) per eps'
class and reuses them across characteristics and derivative orders.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations

import numpy as np

from .characteristics import HalfCharacteristic

DEFAULT_TOL = 1e-12
RADIUS_WARN = 40.0


@dataclass
class ThetaParams:
    tau: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=complex)
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        eig = np.linalg.eigvalsh(self.tau.imag)
        if np.min(eig) <= 0:
            raise ValueError("Im tau must be positive definite")


@dataclass
class DerivThetaTensor:
    """Fully symmetric order-m tensor of m-th derivative theta constants."""

    char: HalfCharacteristic
    order: int
    entries: np.ndarray  # shape (g,)*order; shape () for order 0
    scale: float  # largest single |term| contributing to any entry

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries))) if self.order else abs(complex(self.entries))


def truncation_radius(tau: np.ndarray, tol: float, order: int = 0, r_max: float = RADIUS_WARN) -> float:
    """Radius R with sum_{||Lq|| > R} |term| < tol, L^t L = pi Im(tau).

    Gaussian tail estimate: the number of lattice points in a shell of the
    metric L grows like R^{g-1} / det L, and an order-m derivative adds a
    polynomial factor (2 pi |q|)^m; both enter logarithmically, so a short
    fixed-point iteration converges.
    """
    tau = np.asarray(tau, dtype=complex)
    g = tau.shape[0]
    lam_min = float(np.min(np.linalg.eigvalsh(np.pi * tau.imag)))
    det_l = math.sqrt(abs(np.linalg.det(np.pi * tau.imag)))
    r = math.sqrt(max(math.log(1.0 / tol), 1.0)) + 1.0
    for _ in range(4):
        poly = order * math.log1p(2.0 * math.pi * r / math.sqrt(lam_min))
        shell = max(g, 1) * math.log1p(r) + math.log1p(2.0 ** g / det_l)
        r = math.sqrt(max(math.log(1.0 / tol) + poly + shell + 2.0, 1.0))
    if r / math.sqrt(lam_min) > r_max:
        warnings.warn(
            f"theta truncation radius {r / math.sqrt(lam_min):.1f} exceeds {r_max}: "
            "Im tau is nearly singular",
            RuntimeWarning,
        )
    return r


def _ellipsoid_points(y: np.ndarray, c: np.ndarray, r: float) -> np.ndarray:
    """Shifted lattice points q = n + c (n integer) with q^t y q <= r^2.

    Built coordinate by coordinate from the last axis: a partial tail t of
    the final k coordinates can be completed to a point inside the ellipsoid
    iff t^t inv((y^{-1})_{tail,tail}) t <= r^2 (Schur complement), so the
    intermediate candidate sets stay close to ellipsoid slices instead of
    the full bounding box, which matters from genus 5 on.
    """
    g = y.shape[0]
    y_inv = np.linalg.inv(y)
    slack = r * r * (1.0 + 1e-9)
    tails = np.zeros((1, 0))
    for k in range(1, g + 1):
        lead = g - k
        half = r * math.sqrt(y_inv[lead, lead])
        vals = (
            np.arange(math.floor(-c[lead] - half), math.ceil(-c[lead] + half) + 1)
            + c[lead]
        )
        ext = np.empty((len(tails) * len(vals), k))
        ext[:, 0] = np.tile(vals, len(tails))
        ext[:, 1:] = np.repeat(tails, len(vals), axis=0)
        metric = y if k == g else np.linalg.inv(y_inv[lead:, lead:])
        quad = np.einsum("ij,jk,ik->i", ext, metric, ext)
        tails = ext[quad <= (r * r if k == g else slack)]
    return tails


class ThetaEngine:
    """Theta constants and derivative tensors for one fixed tau."""

    def __init__(self, tau: np.ndarray, tol: float = DEFAULT_TOL, radius: float | None = None):
        self.params = ThetaParams(tau=np.asarray(tau, dtype=complex), tol=tol)
        self.g = self.params.tau.shape[0]
        self.radius = radius
        self._classes: dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]] = {}

    def _lattice_class(self, eps_prime: tuple[int, ...], order: int) -> tuple[np.ndarray, np.ndarray]:
        """(Q, M): shifted lattice points q = n + eps'/2 inside the ellipsoid
        and their quadratic weights M = exp(i pi q tau q)."""
        key = eps_prime
        if key in self._classes:
            return self._classes[key]
        tau = self.params.tau
        # Radius generous enough for every derivative order used (<= 4).
        r = self.radius if self.radius is not None else truncation_radius(tau, self.params.tol, order=4)
        y = np.pi * tau.imag
        c = 0.5 * np.asarray(eps_prime, dtype=float)
        q = _ellipsoid_points(y, c, r)
        m = np.exp(1j * np.pi * np.einsum("ij,jk,ik->i", q, tau, q))
        self._classes[key] = (q, m)
        return q, m

    def theta(self, char: HalfCharacteristic, v: np.ndarray | None = None) -> complex:
        """theta[char](v); v defaults to 0."""
        self._check(char)
        q, m = self._lattice_class(char.eps_prime, 0)
        shift = 0.5 * np.asarray(char.eps, dtype=float)
        if v is not None:
            shift = shift + np.asarray(v, dtype=complex)
        phase = np.exp(2j * np.pi * (q @ shift))
        return complex(np.sum(m * phase))

    def theta_deriv(self, char: HalfCharacteristic, order: int) -> DerivThetaTensor:
        """All order-m partial derivatives of theta[char] at v = 0."""
        self._check(char)
        if order < 0:
            raise ValueError("order must be >= 0")
        q, m = self._lattice_class(char.eps_prime, order)
        phase = np.exp(1j * np.pi * (q @ np.asarray(char.eps, dtype=float)))
        weighted = m * phase
        if order == 0:
            val = np.sum(weighted)
            scale = float(np.max(np.abs(m))) if len(m) else 0.0
            return DerivThetaTensor(char=char, order=0, entries=np.asarray(val), scale=scale)
        g = self.g
        entries = np.zeros((g,) * order, dtype=complex)
        scale = 0.0
        pref = (2j * np.pi) ** order
        for idx in combinations_with_replacement(range(g), order):
            poly = np.ones(len(q))
            for i in idx:
                poly = poly * q[:, i]
            terms = poly * weighted
            val = pref * np.sum(terms)
            if len(terms):
                scale = max(scale, abs(pref) * float(np.max(np.abs(terms))))
            for perm in set(permutations(idx)):
                entries[perm] = val
        return DerivThetaTensor(char=char, order=order, entries=entries, scale=scale)

    def gradient(self, char: HalfCharacteristic) -> np.ndarray:
        return self.theta_deriv(char, 1).entries

    def _check(self, char: HalfCharacteristic) -> None:
        if char.genus != self.g:
            raise ValueError("characteristic genus mismatch")
