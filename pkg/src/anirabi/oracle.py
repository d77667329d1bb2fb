"""Truncated-Fock exact diagonalization, the ground truth for every solver path.

The Hamiltonian is built directly from its definition in the interleaved
basis |0,down>, |0,up>, |1,down>, |1,up>, ...  (index 2n for spin down,
2n+1 for spin up), so eigenvectors can be consumed by the states module
without re-indexing.  Dense solves only: the cutoff cap keeps dimensions
at a few thousand where LAPACK is effectively instant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import SolverError
from .model import ModelParams

__all__ = [
    "TruncatedHamiltonian",
    "build_hamiltonian",
    "eigensolve",
    "converged_spectrum",
    "parity_diagonal",
]

_N_START = 40
_N_CAP = 1280


@dataclass(frozen=True)
class TruncatedHamiltonian:
    """Dense Hermitian matrix in the interleaved spin-boson basis.

    The matrix is real symmetric when theta = 0 (epsilon is always real
    here), complex Hermitian otherwise.
    """

    n_max: int
    dim: int
    matrix: np.ndarray


def build_hamiltonian(params: ModelParams, n_max: int) -> TruncatedHamiltonian:
    """Assemble H with boson cutoff n_max (n_max >= 10).

    Matrix elements: diagonal n*omega -/+ delta for down/up; epsilon couples
    the spins at fixed n; the rotating term gives g*sqrt(n+1) between |n,up>
    and |n+1,down>; the counter-rotating term lam*g*e^{i theta}*sqrt(n+1)
    between |n,down> and |n+1,up>.
    """
    if n_max < 10:
        raise ValueError(f"n_max must be at least 10, got {n_max}")
    dim = 2 * (n_max + 1)
    dtype = float if params.theta == 0.0 else complex
    h = np.zeros((dim, dim), dtype=dtype)
    n = np.arange(n_max + 1)
    down = 2 * n
    up = 2 * n + 1

    h[down, down] = n * params.omega - params.delta
    h[up, up] = n * params.omega + params.delta
    h[down, up] = params.epsilon
    h[up, down] = params.epsilon

    root = params.g * np.sqrt(n[:-1] + 1.0)
    # <n+1,down| H |n,up>
    h[down[1:], up[:-1]] = root
    h[up[:-1], down[1:]] = root
    # <n+1,up| H |n,down>
    cr = params.lam * root * np.exp(1j * params.theta) if dtype is complex else params.lam * root
    h[up[1:], down[:-1]] = cr
    h[down[:-1], up[1:]] = np.conj(cr) if dtype is complex else cr

    return TruncatedHamiltonian(n_max=n_max, dim=dim, matrix=h)


def eigensolve(ham: TruncatedHamiltonian, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowest k eigenpairs (energies ascending, orthonormal columns)."""
    if k > ham.dim:
        raise ValueError(f"requested {k} eigenpairs from dimension {ham.dim}")
    try:
        w, v = scipy.linalg.eigh(
            ham.matrix, subset_by_index=(0, k - 1), check_finite=False
        )
    except scipy.linalg.LinAlgError as exc:
        raise SolverError(
            f"dense eigensolve failed at n_max={ham.n_max}, dim={ham.dim}: {exc}"
        ) from exc
    return w, v


def converged_spectrum(
    params: ModelParams, k: int, tol: float = 1e-10
) -> tuple[np.ndarray, int]:
    """Lowest k energies converged in the cutoff: doubles n_max from 40 until
    successive spectra differ by less than tol.  Returns (energies, n_max)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    n_max = _N_START
    prev = eigensolve(build_hamiltonian(params, n_max), k)[0]
    while n_max <= _N_CAP // 2:
        n_max *= 2
        cur = eigensolve(build_hamiltonian(params, n_max), k)[0]
        if np.max(np.abs(cur - prev)) < tol:
            return cur, n_max
        prev = cur
    raise SolverError(
        f"spectrum not converged to {tol} at cutoff cap n_max={_N_CAP} "
        f"(params={params})"
    )


def parity_diagonal(n_max: int) -> np.ndarray:
    """Diagonal of exp(i pi N), N = a'a + (sz+1)/2, in the interleaved basis."""
    n = np.arange(n_max + 1)
    p = np.empty(2 * (n_max + 1))
    p[0::2] = (-1.0) ** n
    p[1::2] = (-1.0) ** (n + 1)
    return p
