"""First-kind period matrices over Baker's homology basis, by real quadrature.

The curve y^2 = f(x) = prod (x - e_j) with sorted real branch points is cut
along (e_{2k-1}, e_{2k}), k = 1..g, and (e_{2g+1}, inf).  The a_k cycle
encircles the k-th cut; the b_k cycle joins the k-th cut to the cut reaching
infinity.  With the sheet fixed by

    y(x) = i^p sqrt|f(x)|,   p = #{branch points > x},

the holomorphic differentials du_n = x^{g-n} dx / (-2y) are integrated over
the inter-branch-point segments by Gauss-Legendre quadrature after the
substitution x = m + h sin(theta), which removes both inverse-square-root
endpoint singularities analytically.  The period columns are assembled as

    omega[:, k]  = 2 * (integral over cut k),
    omega'[:, k] = 2 * sum_{l >= k} (integral over gap l),

gap l being the segment (e_{2l}, e_{2l+1}) between consecutive cuts.  The
resulting tau = omega^{-1} omega' is symmetric with positive-definite
imaginary part, and the Abel images of the branch points land on the
half-periods of the standard characteristic table; both facts are asserted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .characteristics import HalfCharacteristic, branch_char
from .curve import CurveSpec


@lru_cache(maxsize=32)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def _sheet_power(spec: CurveSpec, x: float) -> int:
    """p = number of branch points strictly greater than x."""
    return int(np.sum(np.asarray(spec.branch_points) > x))


def differential_row(spec: CurveSpec, n: int, x: float, branch_sign: int = 1) -> complex:
    """Value of du_n = x^{g-n} / (-2y) on the fixed sheet at real x.

    Between consecutive branch points the value is purely real or purely
    imaginary according to the parity of the number of branch points to the
    right of x.
    """
    g = spec.genus
    if not 1 <= n <= g:
        raise ValueError(f"differential index {n} out of range 1..{g}")
    if x in spec.branch_points:
        raise ValueError(f"integrand singular at branch point x={x}")
    e = np.asarray(spec.branch_points)
    p = _sheet_power(spec, x)
    y = branch_sign * (1j**p) * np.sqrt(np.abs(np.prod(x - e)))
    return complex(x ** (g - n) / (-2.0 * y))


def _segment_integrals(spec: CurveSpec, order: int) -> np.ndarray:
    """V[l-1, n-1] = int_{e_l}^{e_{l+1}} x^{g-n} dx / sqrt|f(x)|, l = 1..2g.

    Vectorised Gauss-Legendre after x = m + h sin(theta); the endpoint roots
    of f cancel against the cos(theta) Jacobian, leaving a smooth integrand.
    """
    g = spec.genus
    e = np.asarray(spec.branch_points)
    nodes, weights = _gauss_legendre(order)
    theta = 0.5 * np.pi * nodes
    out = np.empty((2 * g, g), dtype=float)
    for l in range(1, 2 * g + 1):
        a, b = e[l - 1], e[l]
        m, h = 0.5 * (a + b), 0.5 * (b - a)
        x = m + h * np.sin(theta)
        # |f| with the two endpoint factors removed: |prod_{j != l, l+1}|.
        rest = np.ones_like(x)
        for j in range(2 * g + 1):
            if j not in (l - 1, l):
                rest *= np.abs(x - e[j])
        core = (0.5 * np.pi) * weights / np.sqrt(rest)
        for n in range(1, g + 1):
            out[l - 1, n - 1] = np.dot(core, x ** (g - n))
    return out


def _assemble(spec: CurveSpec, V: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (omega, omega', cuts, gaps) from raw segment integrals."""
    g = spec.genus
    cuts = np.empty((g, g), dtype=complex)  # column k = integral over cut k
    gaps = np.empty((g, g), dtype=complex)  # column l = integral over gap l
    for l in range(1, 2 * g + 1):
        p = 2 * g + 1 - l  # branch points above the segment
        coeff = -0.5 * (-1j) ** (p % 4)
        col = coeff * V[l - 1]
        if l % 2:
            cuts[:, (l - 1) // 2] = col
        else:
            gaps[:, l // 2 - 1] = col
    omega = 2.0 * cuts
    omega_prime = 2.0 * np.cumsum(gaps[:, ::-1], axis=1)[:, ::-1]
    return omega, omega_prime, cuts, gaps


@dataclass
class PeriodData:
    """Non-normalized periods omega, omega' and tau = omega^{-1} omega'."""

    spec: CurveSpec
    omega: np.ndarray
    omega_prime: np.ndarray
    quad_order: int
    est_error: float
    _cuts: np.ndarray = field(repr=False, default=None)
    _gaps: np.ndarray = field(repr=False, default=None)

    @property
    def tau(self) -> np.ndarray:
        return np.linalg.solve(self.omega, self.omega_prime)

    @property
    def genus(self) -> int:
        return self.spec.genus


def _check_tau(tau: np.ndarray) -> None:
    scale = np.max(np.abs(tau))
    asym = np.max(np.abs(tau - tau.T))
    if asym > 1e-9 * scale:
        raise ValueError(
            "homology sign bookkeeping failure: tau not symmetric "
            f"(max asymmetry {asym:.3e}, scale {scale:.3e});\ntau =\n{tau}"
        )
    eig = np.linalg.eigvalsh(tau.imag)
    if np.min(eig) <= 0:
        raise ValueError(
            "homology sign bookkeeping failure: Im tau not positive definite "
            f"(eigenvalues {eig});\ntau =\n{tau}"
        )


def compute_periods(
    spec: CurveSpec,
    quad_order: int = 96,
    refine_tol: float = 1e-11,
    max_order: int = 3072,
) -> PeriodData:
    """Compute (omega, omega', tau) with order-doubling error control.

    est_error is the largest entrywise relative change of omega and omega'
    between quad_order and 2*quad_order; the order is doubled until it drops
    below refine_tol (or max_order is hit).
    """
    order = quad_order
    V = _segment_integrals(spec, order)
    while True:
        V2 = _segment_integrals(spec, 2 * order)
        o1 = _assemble(spec, V)
        o2 = _assemble(spec, V2)
        scale = max(np.max(np.abs(o2[0])), np.max(np.abs(o2[1])))
        est = max(np.max(np.abs(o1[0] - o2[0])), np.max(np.abs(o1[1] - o2[1]))) / scale
        if est <= refine_tol or 2 * order >= max_order:
            break
        order *= 2
        V = V2
    omega, omega_prime, cuts, gaps = o2
    data = PeriodData(
        spec=spec,
        omega=omega,
        omega_prime=omega_prime,
        quad_order=2 * order,
        est_error=float(est),
        _cuts=cuts,
        _gaps=gaps,
    )
    _check_tau(data.tau)
    return data


def abel_branch_point(
    spec: CurveSpec, periods: PeriodData, k: int, quad_order: int | None = None
) -> np.ndarray:
    """Abel image A(e_k) = int_inf^{(e_k, 0)} dv, as a chain of segments.

    Recomputed from fresh segment integrals (at an order unrelated to the
    one used for the periods) so that the characteristic cross-check also
    validates quadrature convergence.  A(e_{2g+1}) = -sum_k (cut_k integral);
    walking left from e_{2g+1} subtracts one segment integral per step.
    """
    g = spec.genus
    if not 1 <= k <= 2 * g + 1:
        raise ValueError(f"branch index {k} out of range 1..{2 * g + 1}")
    order = quad_order if quad_order is not None else periods.quad_order + 17
    V = _segment_integrals(spec, order)
    _, _, cuts, gaps = _assemble(spec, V)
    du = -np.sum(cuts, axis=1)
    for l in range(2 * g, k - 1, -1):  # segment (e_l, e_{l+1})
        du = du - (cuts[:, (l - 1) // 2] if l % 2 else gaps[:, l // 2 - 1])
    return np.linalg.solve(periods.omega, du)


@dataclass
class LatticeResidual:
    """Distance of a vector from a target point, reduced mod (1, tau)Z^{2g}."""

    reduced: np.ndarray
    norm: float
    shift_n: np.ndarray
    shift_m: np.ndarray


def halfperiod_residual(
    periods: PeriodData, v: np.ndarray, char: HalfCharacteristic
) -> LatticeResidual:
    """Lattice-reduced distance of v from eps/2 + tau eps'/2."""
    tau = periods.tau
    g = periods.genus
    if char.genus != g:
        raise ValueError("characteristic genus mismatch")
    target = 0.5 * np.asarray(char.eps, dtype=float) + tau @ (
        0.5 * np.asarray(char.eps_prime, dtype=float)
    )
    w = np.asarray(v, dtype=complex) - target
    # Real coordinates w = alpha + tau beta; round, then a small local search.
    beta = np.linalg.solve(tau.imag, w.imag)
    alpha = w.real - tau.real @ beta
    m0 = np.round(beta).astype(int)
    n0 = np.round(alpha).astype(int)

    def residual(n, m):
        return w - n - tau @ m

    best_n, best_m = n0.astype(float), m0.astype(float)
    best = residual(best_n, best_m)
    best_norm = np.linalg.norm(best)
    improved = True
    sweeps = 0
    while improved and sweeps < 8 and best_norm > 1e-12:
        improved = False
        sweeps += 1
        for i in range(g):
            for dm in (-2, -1, 1, 2):
                m_try = best_m.copy()
                m_try[i] += dm
                alpha_try = np.round(w.real - tau.real @ m_try)
                r = residual(alpha_try, m_try)
                if np.linalg.norm(r) < best_norm - 1e-15:
                    best_norm = np.linalg.norm(r)
                    best_n, best_m, best = alpha_try, m_try, r
                    improved = True
        # re-center alpha for the current m
        alpha_try = np.round(w.real - tau.real @ best_m)
        r = residual(alpha_try, best_m)
        if np.linalg.norm(r) < best_norm:
            best_norm, best_n, best = np.linalg.norm(r), alpha_try, r
    return LatticeResidual(
        reduced=best, norm=float(best_norm), shift_n=best_n.astype(int), shift_m=best_m.astype(int)
    )


def branch_point_char_residuals(spec: CurveSpec, periods: PeriodData) -> dict[int, float]:
    """Cross-check: A(e_k) matches [eps_k] mod lattice, for every k."""
    out = {}
    for k in range(1, 2 * spec.genus + 2):
        v = abel_branch_point(spec, periods, k)
        out[k] = halfperiod_residual(periods, v, branch_char(spec.genus, k)).norm
    return out


def periods_to_json(periods: PeriodData) -> dict:
    return {
        "curve_hash": periods.spec.content_hash(),
        "quad_order": periods.quad_order,
        "est_error": periods.est_error,
        "omega_re": periods.omega.real.tolist(),
        "omega_im": periods.omega.imag.tolist(),
        "omega_prime_re": periods.omega_prime.real.tolist(),
        "omega_prime_im": periods.omega_prime.imag.tolist(),
    }


def periods_from_json(spec: CurveSpec, raw: dict) -> PeriodData:
    if raw["curve_hash"] != spec.content_hash():
        raise ValueError("period cache does not match curve")
    omega = np.asarray(raw["omega_re"]) + 1j * np.asarray(raw["omega_im"])
    omega_prime = np.asarray(raw["omega_prime_re"]) + 1j * np.asarray(raw["omega_prime_im"])
    data = PeriodData(
        spec=spec,
        omega=omega,
        omega_prime=omega_prime,
        quad_order=raw["quad_order"],
        est_error=raw["est_error"],
    )
    _check_tau(data.tau)
    return data
