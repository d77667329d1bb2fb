"""Transcendental functions whose zeros are the spectrum, plus pole registries.

With both series branches summed at z = 0 (inside the convergence disc, so
the evaluation point may be fixed there),

    G_eps(x)  = phi_1 phibar_2 - phi_2 phibar_1          (any epsilon)
    G_plus(x) = -xi phi_1 + sqrt(lam) phi_2              (epsilon = 0)
    G_minus(x) = sqrt(lam) phi_1 + xi* phi_2             (epsilon = 0)

Regular eigenvalues are zeros of these functions; simple poles sit where the
K-step divisor of either recurrence branch vanishes:

    x_n    = n omega - (1-lam)^2 g^2/(2 omega) + (xi + lam xi*) eps/(2 sqrt(lam))
    xbar_n = (n+1) omega - (1-lam)^2 g^2/(2 omega) - (xi + lam xi*) eps/(2 sqrt(lam))

For epsilon != 0 and theta != 0 the shift is complex; the registry brackets
on the real part and flags the imaginary one (zeros stay on the real x line,
which is checked against the oracle in the test suite).

At epsilon = 0 the sector functions have constant phase on the real axis
(G_plus is exactly real, xi * G_minus is real); root bracketing uses those
de-phased values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import series as _series
from .exceptions import NotConverged, PoleHit
from .model import ModelParams, derive_constants

__all__ = [
    "GValue",
    "PoleRegistry",
    "GEvaluator",
    "g_epsilon",
    "g_parity",
    "poles",
    "EXCLUSION_WINDOW",
]

# Half-width (in units of omega) of the default no-search window around a
# confirmed pole; separates genuine zeros from pole-adjacent sign flips.
EXCLUSION_WINDOW = 1e-4


@dataclass(frozen=True)
class GValue:
    """One G-function evaluation.  ``value`` is None when near_pole masked it."""

    x: float
    value: complex | None
    sector: str  # "eps" | "plus" | "minus"
    near_pole: bool


@dataclass(frozen=True)
class PoleRegistry:
    """Real bracketing abscissas of both pole families, n = 0..n_max.

    ``shift_eps`` is the symmetry-breaking displacement (xi + lam xi*) eps /
    (2 sqrt(lam)); when it has an imaginary part the registry abscissas are
    its real-part projections and ``complex_shift`` is set.
    """

    family_forward: np.ndarray
    family_backward: np.ndarray
    n_range: range
    shift_eps: complex
    complex_shift: bool


def poles(params: ModelParams, n_max: int) -> PoleRegistry:
    """Pole abscissas of both branches for n = 0..n_max."""
    if params.lam <= 0:
        raise ValueError("pole registry requires lam > 0")
    cons = derive_constants(params)
    sq = math.sqrt(params.lam)
    shift_g = (1.0 - params.lam) ** 2 * params.g**2 / (2.0 * params.omega)
    shift_eps = (cons.xi + params.lam * cons.xi.conjugate()) * params.epsilon / (2.0 * sq)
    n = np.arange(n_max + 1)
    fwd = n * params.omega - shift_g + shift_eps.real
    bwd = (n + 1) * params.omega - shift_g - shift_eps.real
    return PoleRegistry(
        family_forward=fwd,
        family_backward=bwd,
        n_range=range(n_max + 1),
        shift_eps=shift_eps,
        complex_shift=abs(shift_eps.imag) > 1e-14 * params.omega,
    )


class GEvaluator:
    """Reusable evaluator: precomputes constants once, then maps x -> G.

    Pure evaluation, no state mutation after construction; safe to share
    across parallel x grids.
    """

    def __init__(
        self,
        params: ModelParams,
        n_cap: int = _series.DEFAULT_N_CAP,
        tail_rel: float = _series.DEFAULT_TAIL_REL,
        pole_guard: float = _series.DEFAULT_POLE_GUARD,
    ):
        if params.lam <= 0:
            raise ValueError("G-function construction requires lam > 0")
        if params.g <= 0:
            raise ValueError("G-function construction requires g > 0")
        self.params = params
        self.constants = derive_constants(params)
        self.n_cap = n_cap
        self.tail_rel = tail_rel
        self.pole_guard = pole_guard
        self._sq = math.sqrt(params.lam)

    def _branch_sums(self, x: float, backward: bool) -> tuple[complex, complex]:
        cons = self.constants
        p = self.params
        f = cons.fbar if backward else cons.f
        _, _, sum_k, sum_l, n_used, converged, pole_hit, min_den = _series.branch_series(
            p.omega, p.g, p.lam, cons.xi, cons.c, f, x, backward,
            self.n_cap, self.tail_rel, self.pole_guard,
        )
        if pole_hit:
            raise PoleHit("backward" if backward else "forward", n_used, min_den)
        if not converged:
            raise NotConverged(
                f"series not converged at x={x} within n_cap={self.n_cap}"
            )
        return sum_k, sum_l

    def phi_forward(self, x: float) -> tuple[complex, complex]:
        """(phi_1, phi_2) at z = 0."""
        sum_k, sum_l = self._branch_sums(x, backward=False)
        return sum_l, sum_k

    def phi_backward(self, x: float) -> tuple[complex, complex]:
        """(phibar_1, phibar_2) at z = 0."""
        sum_k, sum_l = self._branch_sums(x, backward=True)
        return sum_k, sum_l

    def eps_value(self, x: float) -> complex:
        phi1, phi2 = self.phi_forward(x)
        phib1, phib2 = self.phi_backward(x)
        return phi1 * phib2 - phi2 * phib1

    def parity_value(self, x: float, sector: str) -> complex:
        phi1, phi2 = self.phi_forward(x)
        xi = self.constants.xi
        if sector == "plus":
            return -xi * phi1 + self._sq * phi2
        if sector == "minus":
            return self._sq * phi1 + xi.conjugate() * phi2
        raise ValueError(f"unknown sector {sector!r}")

    def bracket_value(self, x: float, sector: str) -> float:
        """De-phased real value used for sign-change bracketing.

        For the parity sectors the de-phasing makes the value exactly real in
        exact arithmetic; for the eps sector this is Re G_eps and the
        imaginary part is checked separately at accepted roots.
        """
        if sector == "eps":
            return self.eps_value(x).real
        if sector == "minus":
            return (self.constants.xi * self.parity_value(x, "minus")).real
        return self.parity_value(x, "plus").real


def _registry_distance(registry: PoleRegistry, x: float) -> float:
    d = np.inf
    for fam in (registry.family_forward, registry.family_backward):
        if len(fam):
            d = min(d, float(np.min(np.abs(fam - x))))
    return d


@lru_cache(maxsize=32)
def _cached_evaluator(params: ModelParams) -> GEvaluator:
    return GEvaluator(params)


@lru_cache(maxsize=32)
def _cached_registry(params: ModelParams, n_max: int) -> PoleRegistry:
    return poles(params, n_max)


def _evaluate(params: ModelParams, x: float, sector: str) -> GValue:
    ev = _cached_evaluator(params)
    reg = _cached_registry(params, max(8, int(abs(x) / params.omega) + 4))
    near = _registry_distance(reg, x) < EXCLUSION_WINDOW * params.omega
    try:
        if sector == "eps":
            value = ev.eps_value(x)
        else:
            value = ev.parity_value(x, sector)
    except PoleHit:
        return GValue(x=x, value=None, sector=sector, near_pole=True)
    return GValue(x=x, value=value, sector=sector, near_pole=near)


def g_epsilon(params: ModelParams, x: float) -> GValue:
    """G_eps(x) at z = 0; complex in general."""
    return _evaluate(params, x, "eps")


def g_parity(params: ModelParams, x: float, sector: str) -> GValue:
    """Sector function G_plus or G_minus; defined only at epsilon = 0."""
    if params.epsilon != 0.0:
        raise ValueError("parity sector functions require epsilon = 0")
    if sector not in ("plus", "minus"):
        raise ValueError(f"sector must be 'plus' or 'minus', got {sector!r}")
    return _evaluate(params, x, sector)
