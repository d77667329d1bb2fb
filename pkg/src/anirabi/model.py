"""Model parameters, frame transformations and physical parameter mappings.

The anisotropic Rabi model couples a two-level system to one bosonic mode:

    H = omega a'a + epsilon sx + delta sz
        + g [ (a' s- + a s+) + lam (e^{i theta} a' s+ + e^{-i theta} a s-) ]

with sigma^± = (sx ± i sy)/2.  ``g`` weights the excitation-conserving
(rotating) coupling, ``lam * g`` the non-conserving (counter-rotating) one,
``theta`` attaches a phase to the latter and ``epsilon`` breaks the Z2
parity symmetry exp(i pi N), N = a'a + (sz+1)/2.

A spin-space rotation U(lam, theta) takes H to a frame where the Bargmann
eigenproblem closes into three-term recurrences.  The constants of that
frame (xi, c, d and the two branch constants f, fbar) are computed here and
consumed by the series / gfunction modules; the rotation matrices themselves
are exposed for tests and state reconstruction.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "DerivedConstants",
    "FrameMaps",
    "derive_constants",
    "frame_maps",
    "map_dipole",
    "spin_orbit_couplings",
    "spin_orbit_angle",
    "map_circuit",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the Hamiltonian.  Immutable value type.

    omega : boson frequency (> 0, sets the energy scale)
    delta : half level splitting (any sign)
    g     : rotating coupling strength (>= 0)
    lam   : anisotropy weight of the counter-rotating coupling (>= 0;
            lam = 0 is the Jaynes-Cummings limit, served by closed forms)
    epsilon : symmetry-breaking field on sx
    theta : counter-rotating phase, in (-pi, pi]
    """

    omega: float
    delta: float
    g: float
    lam: float
    epsilon: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.g < 0:
            raise ValueError(f"g must be non-negative, got {self.g}")
        if self.lam < 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        if not (-math.pi < self.theta <= math.pi):
            raise ValueError(f"theta must lie in (-pi, pi], got {self.theta}")

    @property
    def is_jc(self) -> bool:
        """True in the Jaynes-Cummings limit lam = 0."""
        return self.lam == 0.0

    @property
    def z2_symmetric(self) -> bool:
        return self.epsilon == 0.0


@dataclass(frozen=True)
class DerivedConstants:
    """Frame-transformed constants entering the series recurrences.

    xi = e^{i theta/2} (unit modulus), eta the spin mixing angle with
    tan(eta) = sqrt(lam).  ``f`` belongs to the forward solution branch,
    ``fbar`` to the backward one; f - fbar = 2(1-lam)sqrt(lam) g^2 xi/omega.
    """

    xi: complex
    c: complex
    d: complex
    f: complex
    fbar: complex
    eta: float


def derive_constants(params: ModelParams) -> DerivedConstants:
    """Compute the rotated-frame constants for the series construction.

    Rejects lam = 0: the recurrence degenerates there and the spectrum module
    serves the Jaynes-Cummings closed forms instead.
    """
    lam = params.lam
    if lam == 0.0:
        raise ValueError(
            "lam = 0 is the Jaynes-Cummings limit; use spectrum.jc_spectrum"
        )
    sq = math.sqrt(lam)
    xi = cmath.exp(0.5j * params.theta)
    # (xi + xi*) = 2 cos(theta/2) is exactly real; keep c real-valued.
    c = complex(
        (1.0 - lam) / (1.0 + lam) * params.delta
        + 2.0 * math.cos(0.5 * params.theta) * sq / (1.0 + lam) * params.epsilon
    )
    d = (2.0 * sq * xi / (1.0 + lam)) * params.delta - (
        (xi * xi - lam) / (1.0 + lam)
    ) * params.epsilon
    shift = (1.0 - lam) * sq * params.g**2 * xi / params.omega
    return DerivedConstants(
        xi=xi, c=c, d=d, f=d + shift, fbar=d - shift, eta=math.atan(sq)
    )


@dataclass(frozen=True)
class FrameMaps:
    """Unitaries linking the lab frame to the solver frames.

    U : 2x2 spin rotation diagonalising the coupling structure
    W : fixed 2x2 rotation to the parity-adapted frame
    theta : phase removed (at epsilon = 0) by the boson-number rotation
            R(theta) = exp(i theta/2 (sz/2 + a'a))
    """

    U: np.ndarray
    W: np.ndarray
    theta: float

    def r_phases(self, n_max: int) -> np.ndarray:
        """Diagonal of R(theta) in the interleaved |n,down>,|n,up> basis."""
        n = np.arange(n_max + 1)
        phases = np.empty(2 * (n_max + 1), dtype=complex)
        phases[0::2] = np.exp(0.5j * self.theta * (n - 0.5))
        phases[1::2] = np.exp(0.5j * self.theta * (n + 0.5))
        return phases


def frame_maps(params: ModelParams) -> FrameMaps:
    """Build U(lam, theta) and W; unitary to machine precision."""
    sq = math.sqrt(params.lam)
    xi = cmath.exp(0.5j * params.theta)
    norm = 1.0 / math.sqrt(1.0 + params.lam)
    u = norm * np.array([[xi, -sq], [sq, xi.conjugate()]], dtype=complex)
    w = np.array([[1.0, -1.0], [1.0, 1.0]], dtype=complex) / math.sqrt(2.0)
    return FrameMaps(U=u, W=w, theta=params.theta)


def map_dipole(d_me: float, mu_me: float) -> tuple[float, float]:
    """Map electric/magnetic dipole matrix elements to (g, lam).

    A two-level emitter in crossed quantized electric and magnetic fields
    couples through d (via a + a') and mu (via i(a - a')); their sum and
    normalized difference set the rotating strength and the anisotropy.
    """
    s = d_me + mu_me
    if s == 0:
        raise ZeroDivisionError("d_me + mu_me = 0: mapping is degenerate")
    return 0.5 * s, (d_me - mu_me) / s


def spin_orbit_couplings(g: float, lam: float, theta: float) -> tuple[float, float]:
    """Rashba/Dresselhaus strengths (alpha, beta) for given (g, lam, theta).

    Verbatim mapping alpha = sqrt(g^2 + (1+lam)^2) sin(theta), beta the
    cosine partner; units follow the Landau-level convention implicit in the
    mapping (the radicand mixes the two couplings without a scale factor).
    """
    r = math.sqrt(g * g + (1.0 + lam) ** 2)
    return r * math.sin(theta), r * math.cos(theta)


def spin_orbit_angle(alpha: float, beta: float) -> tuple[float, float]:
    """Invert the spin-orbit mapping: returns (theta, radius)."""
    if alpha == 0.0 and beta == 0.0:
        raise ValueError("(alpha, beta) = (0, 0) does not determine theta")
    return math.atan2(alpha, beta), math.hypot(alpha, beta)


def map_circuit(omega_p: float, ej_s: float, lp2: float, m: float) -> ModelParams:
    """Map coupled-SQUID circuit constants to model parameters.

    ``lp2`` is the full inductive coupling 2*Lp_tilde (> 0), ``m`` the mutual
    inductance; the circuit couplings enter as g(1+lam) = lp2, g(1-lam) = m.
    """
    if lp2 <= 0:
        raise ValueError(f"inductive coupling 2*Lp_tilde must be positive, got {lp2}")
    s = lp2 + m
    if s == 0:
        raise ZeroDivisionError("2*Lp_tilde + M = 0: mapping is degenerate")
    return ModelParams(
        omega=omega_p, delta=0.0, g=0.5 * s, lam=(lp2 - m) / s, epsilon=ej_s, theta=0.0
    )
