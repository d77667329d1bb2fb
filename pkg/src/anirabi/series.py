"""Series solutions of the rotated-frame eigenproblem.

In the Bargmann representation (a' -> z, a -> d/dz) the rotated Hamiltonian
turns into two coupled first-order ODEs for the spinor components
(phi_1, phi_2).  Writing phi_i(z) = exp(-sqrt(lam) g xi z / omega) psi_i(y)
with y = z + sqrt(lam) g xi*/omega and trial parameter x = E + lam g^2/omega,
the analytic-at-y=0 solution is a pair of power series whose coefficients
K_n, L_n obey a three-term recurrence:

    a_n K_{n+1} = b_n K_n + c_n K_{n-1},      K_{-1} = 0, K_0 = 1,

with L_n given by a companion ratio.  A second ("backward") branch solves the
z -> -z problem with its own constants (fbar, conjugate role of K and L).
Both series converge inside |y| < 2 sqrt(lam) g / omega; evaluated at z = 0
the term ratio is exactly 1/2, so the tail test converges in a few dozen
orders for any parameters.

Numerical caveat: the companion-ratio denominators n*omega - x +/- c vanish
on a lattice of x values where the coefficients are finite analytically but
suffer 0/0 cancellation in floating point; the PoleHit guard masks a window
of relative width ~1e-9 around them.  For very large g/omega or x >> omega
the recurrence additionally loses digits to cancellation before the tail
test passes; no extended-precision path is provided, the guard and the
convergence flag make the breakdown visible instead.

The hot loop lives in a compiled kernel when available (see _backend).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._backend import branch_series
from .exceptions import NotConverged, PoleHit
from .model import DerivedConstants, ModelParams, derive_constants

__all__ = [
    "CoefficientTable",
    "SeriesPoint",
    "forward_coefficients",
    "backward_coefficients",
    "series_point",
    "eval_phi",
    "recurrence_abc",
    "DEFAULT_N_CAP",
    "DEFAULT_TAIL_REL",
    "DEFAULT_POLE_GUARD",
]

DEFAULT_N_CAP = 250
DEFAULT_TAIL_REL = 1e-14
DEFAULT_POLE_GUARD = 1e-9


@dataclass(frozen=True)
class CoefficientTable:
    """Recurrence output at one trial parameter x.

    K holds K_0..K_{n_used} (one lookahead entry), L holds L_0..L_{n_used-1}.
    ``converged`` records the tail test verdict at z = 0.
    """

    x: float
    branch: str
    K: np.ndarray
    L: np.ndarray
    n_used: int
    converged: bool


@dataclass(frozen=True)
class SeriesPoint:
    """Evaluation point data: shifted variable y and exponential prefactor."""

    z: complex
    y: complex
    prefactor: complex


def series_point(params: ModelParams, z: complex = 0j) -> SeriesPoint:
    """Build the evaluation-point data for a given Bargmann argument z."""
    cons = derive_constants(params)
    s = math.sqrt(params.lam) * params.g / params.omega
    return SeriesPoint(
        z=z,
        y=z + s * cons.xi.conjugate(),
        prefactor=cmath.exp(-s * cons.xi * z),
    )


def _table(
    constants: DerivedConstants,
    params: ModelParams,
    x: float,
    backward: bool,
    n_cap: int,
    tail_rel: float,
    pole_guard: float,
) -> CoefficientTable:
    f = constants.fbar if backward else constants.f
    K, L, _, _, n_used, converged, pole_hit, min_den = branch_series(
        params.omega,
        params.g,
        params.lam,
        constants.xi,
        constants.c,
        f,
        x,
        backward,
        n_cap,
        tail_rel,
        pole_guard,
    )
    branch = "backward" if backward else "forward"
    if pole_hit:
        raise PoleHit(branch, n_used, min_den)
    return CoefficientTable(
        x=x, branch=branch, K=K, L=L, n_used=n_used, converged=converged
    )


def forward_coefficients(
    constants: DerivedConstants,
    params: ModelParams,
    x: float,
    n_cap: int = DEFAULT_N_CAP,
    tail_rel: float = DEFAULT_TAIL_REL,
    pole_guard: float = DEFAULT_POLE_GUARD,
) -> CoefficientTable:
    """K_n^+, L_n^+ at trial parameter x.  Raises PoleHit near a pole."""
    if params.lam <= 0:
        raise ValueError("series construction requires lam > 0")
    return _table(constants, params, x, False, n_cap, tail_rel, pole_guard)


def backward_coefficients(
    constants: DerivedConstants,
    params: ModelParams,
    x: float,
    n_cap: int = DEFAULT_N_CAP,
    tail_rel: float = DEFAULT_TAIL_REL,
    pole_guard: float = DEFAULT_POLE_GUARD,
) -> CoefficientTable:
    """K_n^-, L_n^- of the z -> -z branch."""
    if params.lam <= 0:
        raise ValueError("series construction requires lam > 0")
    return _table(constants, params, x, True, n_cap, tail_rel, pole_guard)


def eval_phi(table: CoefficientTable, point: SeriesPoint) -> tuple[complex, complex]:
    """Sum the two series of a table at the given point.

    Returns (phi_1, phi_2): for the forward branch phi_1 carries the L
    coefficients and phi_2 the K coefficients; the backward branch swaps the
    roles.  Compensated summation; raises NotConverged when the table failed
    its tail test or the requested point lies too far out for the stored
    truncation.
    """
    if not table.converged:
        raise NotConverged(f"{table.branch} table at x={table.x} is not converged")
    n = table.n_used
    powers = point.y ** np.arange(n)
    terms_k = table.K[:n] * powers
    terms_l = table.L[:n] * powers
    sum_k = _kahan(terms_k)
    sum_l = _kahan(terms_l)
    scale = max(abs(sum_k), abs(sum_l), 1e-30)
    tail = max(np.max(np.abs(terms_k[-4:])), np.max(np.abs(terms_l[-4:])))
    if tail > 1e-10 * scale:
        raise NotConverged(
            f"stored truncation n_used={n} insufficient at |y|={abs(point.y):.3g}"
        )
    if table.branch == "forward":
        return point.prefactor * sum_l, point.prefactor * sum_k
    return point.prefactor * sum_k, point.prefactor * sum_l


def _kahan(terms: np.ndarray) -> complex:
    s = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for t in terms:
        y = t - comp
        tmp = s + y
        comp = (tmp - s) - y
        s = tmp
    return s


def recurrence_abc(
    constants: DerivedConstants,
    params: ModelParams,
    x: float,
    n: int,
    branch: str = "forward",
) -> tuple[complex, complex, complex]:
    """Raw recurrence coefficients (a_n, b_n, c_n) at order n.

    Direct formula evaluation, independent of the kernel loop; used for
    cross-checks and for the pole-lifting numerator where the kernel stops
    short of K_{n+1}.  c_0 multiplies K_{-1} = 0 and is returned as 0.
    """
    om, g, lam = params.omega, params.g, params.lam
    sq = math.sqrt(lam)
    xi = constants.xi
    xis = xi.conjugate()
    c = constants.c
    base = 4.0 * lam * g * g / om
    if branch == "forward":
        f = constants.f
        fs = f.conjugate()
        d1 = n * om - x + c
        a = (2.0 * sq - (1.0 - lam) * f * xis / d1) * (n + 1) * g * xis
        b = base + n * om - x - c - fs * f / d1
        cc = 0.0 + 0.0j
        if n >= 1:
            d0 = (n - 1) * om - x + c
            b -= (1.0 - lam) ** 2 * g * g * n / d0
            cc = -2.0 * sq * g * xi + (1.0 - lam) * g * fs * xi * xi / d0
        return a, b, cc
    if branch == "backward":
        f = constants.fbar
        fs = f.conjugate()
        d1 = n * om - x - c
        d2 = (n + 1) * om - x - c
        a = (2.0 * sq + (1.0 - lam) * f * xis / d2) * (n + 1) * g * xis
        b = base + n * om - x + c - fs * f / d1 - (1.0 - lam) ** 2 * g * g * (n + 1) / d2
        cc = 0.0 + 0.0j
        if n >= 1:
            cc = -2.0 * sq * g * xi - (1.0 - lam) * g * fs * xi * xi / d1
        return a, b, cc
    raise ValueError(f"unknown branch {branch!r}")
