"""Eigenstate reconstruction, parity, spin density matrix and entanglement entropy.

Series eigenstates are assembled in the displaced number basis

    |n>> = (a' + s)^n |beta>,   s = sqrt(lam) g xi*/omega,
                                beta = -sqrt(lam) g xi/omega,

where |beta> is the coherent state reached from vacuum.  The rotated-frame
spinor (sum_n L_n |n>>, sum_n K_n |n>>) is mapped back to the lab frame with
the spin rotation U and normalized in a truncated Fock basis.  The spin
density matrix follows by tracing the boson out of |up>, |down> amplitude
arrays; the entanglement entropy is the von Neumann entropy of its
eigenvalues (natural log by default).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import series as _series
from .exceptions import TruncationError
from .model import ModelParams, derive_constants, frame_maps
from .spectrum import EnergyRoot, first_crossing

__all__ = [
    "FockState",
    "SpinDensity",
    "displaced_to_fock",
    "eigenstate_series",
    "parity_of",
    "juddian_states",
    "parity_combinations",
    "reduced_spin_density",
    "entropy",
    "to_vector",
    "from_vector",
]

DEFAULT_N_MAX = 120
_TAIL_MASS = 1e-10  # allowed weight in the last 10 Fock levels


@dataclass(frozen=True)
class FockState:
    """Two-component bosonic wavefunction over n = 0..n_max.

    Amplitudes are stored normalized; ``norm`` keeps the L2 norm the raw
    assembly had before normalization.  The interleaved oracle ordering is
    vec[2n] = down_n, vec[2n+1] = up_n (see to_vector / from_vector).
    """

    up: np.ndarray
    down: np.ndarray
    n_max: int
    norm: float


@dataclass(frozen=True)
class SpinDensity:
    """2x2 reduced spin density matrix in the (up, down) basis."""

    rho: np.ndarray
    eigenvalues: tuple[float, float]


def _check_tail(weight_tail: float, weight_total: float, what: str):
    if weight_tail > _TAIL_MASS * weight_total:
        raise TruncationError(
            f"{what}: relative tail mass {weight_tail / weight_total:.3e} "
            f"exceeds {_TAIL_MASS:g}; increase n_max"
        )


def _coherent_amplitudes(beta: complex, n_max: int) -> np.ndarray:
    amps = np.empty(n_max + 1, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(beta) ** 2)
    for m in range(1, n_max + 1):
        amps[m] = amps[m - 1] * beta / math.sqrt(m)
    return amps


def _raise_op(vec: np.ndarray) -> np.ndarray:
    out = np.zeros_like(vec)
    m = np.arange(1, len(vec))
    out[1:] = np.sqrt(m) * vec[:-1]
    return out


def displaced_to_fock(
    displacement: complex, shift: complex, n: int, n_max: int
) -> np.ndarray:
    """Fock amplitudes of (a' + shift)^n applied to the coherent state
    |displacement>.  Raises TruncationError when weight leaks past the cutoff."""
    vec = _coherent_amplitudes(displacement, n_max)
    for _ in range(n):
        vec = shift * vec + _raise_op(vec)
    total = float(np.sum(np.abs(vec) ** 2))
    tail = float(np.sum(np.abs(vec[n_max - 9 :]) ** 2))
    _check_tail(tail, total, f"displaced basis state n={n}")
    return vec


def _normalized(up: np.ndarray, down: np.ndarray, n_max: int) -> FockState:
    norm = math.sqrt(float(np.sum(np.abs(up) ** 2 + np.abs(down) ** 2)))
    if norm == 0.0:
        raise ValueError("cannot normalize the zero state")
    up = up / norm
    down = down / norm
    tail = float(np.sum(np.abs(up[n_max - 9 :]) ** 2 + np.abs(down[n_max - 9 :]) ** 2))
    _check_tail(tail, 1.0, "assembled state")
    return FockState(up=up, down=down, n_max=n_max, norm=norm)


def _displacement_matrix(beta: complex, n_max: int) -> np.ndarray:
    """Dense displacement operator exp(beta a' - beta* a) in the Fock basis."""
    a = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    m = np.arange(1, n_max + 1)
    a[m - 1, m] = np.sqrt(m)
    return scipy.linalg.expm(beta * a.conj().T - np.conj(beta) * a)


def _miller_coefficients(cons, params: ModelParams, x: float, table, m_top: int):
    """Backward (minimal-solution) recursion for the series coefficients.

    At an eigenvalue the wanted solution is the minimal one of the three-term
    recurrence, which the forward sweep loses to roundoff growth; recursing
    downward from a trial seed and normalizing to K_0 = 1 recovers it to
    machine accuracy.  Returns (K, L) arrays of length m_top+2 / m_top+1, or
    None when the recursion is unreliable here (tiny c_n divisor, hazard
    denominator, or disagreement with the trusted low orders of the forward
    sweep).
    """
    om, g, lam = params.omega, params.g, params.lam
    sq = math.sqrt(lam)
    n_start = m_top + 30
    k = np.zeros(n_start + 2, dtype=complex)
    k[n_start + 1] = 0.0
    k[n_start] = 1.0
    for n in range(n_start, 0, -1):
        a, b, c = _series.recurrence_abc(cons, params, x, n, "forward")
        d0 = (n - 1) * om - x + cons.c
        scale_c = 2.0 * sq * g + abs((1.0 - lam) * g * cons.f.conjugate() / d0)
        if abs(c) < 1e-8 * max(scale_c, 1e-30):
            return None
        k[n - 1] = (a * k[n + 1] - b * k[n]) / c
        peak = abs(k[n - 1])
        if peak > 1e250:
            k[n - 1 :] /= peak
    if k[0] == 0.0:
        return None
    k = k / k[0]
    trusted = min(4, table.n_used - 1, m_top)
    for n in range(1, trusted + 1):
        ref = table.K[n]
        if abs(k[n] - ref) > 1e-6 * max(abs(ref), 1e-30):
            return None
    keep = m_top + 2
    l_arr = np.zeros(keep - 1, dtype=complex)
    xis = cons.xi.conjugate()
    fs = cons.f.conjugate()
    for n in range(keep - 1):
        d1 = n * om - x + cons.c
        if abs(d1) < 1e-9 * om:
            return None
        l_arr[n] = (fs * k[n] - xis * xis * (1.0 - lam) * g * (n + 1) * k[n + 1]) / d1
    return k[:keep], l_arr


def eigenstate_series(
    params: ModelParams, root: EnergyRoot, n_max: int = DEFAULT_N_MAX
) -> FockState:
    """Lab-frame eigenstate from the forward series at a regular root.

    Uses the identity (a' + s)^n |beta> = sqrt(n!) D(beta) |n> (valid because
    beta = -conj(s) here): the spinor is assembled in the displaced frame
    with weights K_n sqrt(n!), L_n sqrt(n!) and rotated back with one
    displacement operator.  The true weights decay super-exponentially at an
    eigenvalue while forward-recurrence noise grows, so the weight sequence
    is cut at its smallest magnitude (the attainable noise floor).
    """
    if root.kind != "regular":
        raise ValueError("series reconstruction handles regular roots only; "
                         "use juddian_states at exceptional points")
    cons = derive_constants(params)
    table = _series.forward_coefficients(cons, params, root.x)
    n_used = table.n_used

    root_fact = np.ones(n_used)
    for n in range(1, n_used):
        root_fact[n] = root_fact[n - 1] * math.sqrt(n)
    w_k = table.K[:n_used] * root_fact
    w_l = table.L[:n_used] * root_fact
    mags = np.maximum(np.abs(w_k), np.abs(w_l))
    n_cut = int(np.argmin(mags)) + 1

    refined = _miller_coefficients(cons, params, root.x, table, min(n_cut + 25, 100))
    if refined is not None:
        k_ref, l_ref = refined
        m = len(l_ref)
        root_fact = np.ones(m)
        for n in range(1, m):
            root_fact[n] = root_fact[n - 1] * math.sqrt(n)
        w_k = k_ref[:m] * root_fact
        w_l = l_ref * root_fact
        mags = np.maximum(np.abs(w_k), np.abs(w_l))
        n_cut = int(np.argmin(mags)) + 1

    floor = mags[n_cut - 1] / max(np.max(mags), 1e-300)
    if floor > 1e-6:
        warnings.warn(
            f"eigenstate weights reach noise floor {floor:.1e} of peak at "
            f"order {n_cut}; state precision is limited",
            stacklevel=2,
        )
    if n_cut > n_max - 20:
        raise TruncationError(
            f"series needs {n_cut} displaced orders, too close to n_max={n_max}"
        )

    v_k = np.zeros(n_max + 1, dtype=complex)
    v_l = np.zeros(n_max + 1, dtype=complex)
    v_k[:n_cut] = w_k[:n_cut]
    v_l[:n_cut] = w_l[:n_cut]
    s = math.sqrt(params.lam) * params.g / params.omega
    disp = _displacement_matrix(-s * cons.xi, n_max)
    sum_k = disp @ v_k
    sum_l = disp @ v_l

    u = frame_maps(params).U
    up = u[0, 0] * sum_l + u[0, 1] * sum_k
    down = u[1, 0] * sum_l + u[1, 1] * sum_k
    return _normalized(up, down, n_max)


def parity_of(state: FockState) -> float:
    """Expectation of exp(i pi N), N = a'a + (sz+1)/2, in [-1, 1]."""
    signs = (-1.0) ** np.arange(state.n_max + 1)
    return float(np.sum(signs * (np.abs(state.down) ** 2 - np.abs(state.up) ** 2)))


def juddian_states(
    params: ModelParams, n_max: int = DEFAULT_N_MAX, rtol: float = 1e-8
) -> tuple[FockState, FockState]:
    """The two closed-form degenerate states at the first level crossing.

    Valid only on the crossing manifold g = sqrt(2 |delta| omega/(1-lam^2))
    with theta = 0, eps = 0, lam < 1; there the series terminates at order
    zero and the lab-frame states are exponential (coherent) in Bargmann
    space:

        (sqrt(lam) e^{-u z}, e^{-u z})  and  (sqrt(lam) e^{+u z}, -e^{+u z}),

    u = sqrt(lam) g / omega.  Both share E = -(1 + lam^2) g^2 / (2 omega).
    """
    if params.theta != 0.0 or params.epsilon != 0.0:
        raise ValueError("closed-form crossing states require theta = 0, eps = 0")
    g_c, _ = first_crossing(params.delta, params.lam, params.omega)
    if abs(params.g - g_c) > rtol * max(1.0, g_c):
        raise ValueError(
            f"parameters are off the crossing manifold: g={params.g}, g_c={g_c}"
        )
    u = math.sqrt(params.lam) * params.g / params.omega
    sq = math.sqrt(params.lam)
    coh_m = _coherent_amplitudes(-u, n_max)
    coh_p = _coherent_amplitudes(+u, n_max)
    s1 = _normalized(sq * coh_m, coh_m.copy(), n_max)
    s2 = _normalized(sq * coh_p, -coh_p, n_max)
    return s1, s2


def parity_combinations(s1: FockState, s2: FockState) -> tuple[FockState, FockState]:
    """Definite-parity combinations (even, odd) of a degenerate doublet."""
    n_max = s1.n_max
    even = _normalized(s1.up - s2.up, s1.down - s2.down, n_max)
    odd = _normalized(s1.up + s2.up, s1.down + s2.down, n_max)
    if parity_of(even) < parity_of(odd):
        even, odd = odd, even
    return even, odd


def reduced_spin_density(state: FockState) -> SpinDensity:
    """Trace out the boson: rho_{ss'} = sum_n amp_{s,n} conj(amp_{s',n})."""
    uu = float(np.sum(np.abs(state.up) ** 2))
    dd = float(np.sum(np.abs(state.down) ** 2))
    ud = complex(np.sum(state.up * np.conj(state.down)))
    rho = np.array([[uu, ud], [np.conj(ud), dd]], dtype=complex)
    half_gap = math.sqrt(0.25 * (uu - dd) ** 2 + abs(ud) ** 2)
    mid = 0.5 * (uu + dd)
    p_hi = min(1.0, max(0.0, mid + half_gap))
    p_lo = min(1.0, max(0.0, mid - half_gap))
    return SpinDensity(rho=rho, eigenvalues=(p_hi, p_lo))


def entropy(rho: SpinDensity, base: str = "nat") -> float:
    """Von Neumann entropy -sum p ln p of the spin density (0 ln 0 := 0)."""
    if base == "nat":
        log = math.log
    elif base == "log2":
        log = math.log2
    else:
        raise ValueError(f"base must be 'nat' or 'log2', got {base!r}")
    s = 0.0
    for p in rho.eigenvalues:
        if p > 0.0:
            s -= p * log(p)
    return s


def to_vector(state: FockState) -> np.ndarray:
    """Interleaved oracle-ordering vector: vec[2n]=down_n, vec[2n+1]=up_n."""
    vec = np.empty(2 * (state.n_max + 1), dtype=complex)
    vec[0::2] = state.down
    vec[1::2] = state.up
    return vec


def from_vector(vec: np.ndarray, normalize: bool = True) -> FockState:
    """FockState from an interleaved oracle-ordering vector."""
    n_max = len(vec) // 2 - 1
    down = np.asarray(vec[0::2], dtype=complex)
    up = np.asarray(vec[1::2], dtype=complex)
    if normalize:
        return _normalized(up, down, n_max)
    norm = math.sqrt(float(np.sum(np.abs(up) ** 2 + np.abs(down) ** 2)))
    return FockState(up=up, down=down, n_max=n_max, norm=norm)
