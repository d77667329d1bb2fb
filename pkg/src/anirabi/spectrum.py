"""From G-functions to the energy spectrum.

Pole-aware bracketing plus Brent refinement for the regular zeros, a
pole-lifting probe for the exceptional (Juddian) doublets, the closed form
for the first level crossing, Jaynes-Cummings closed forms for lam = 0, and
the Bloch-Siegert shift expressions.

Root-search contract: registered poles are numerically confirmed (|G| must
actually grow toward them) before a window is excluded around them.  This
matters because the registered abscissas stop being poles exactly when they
are lifted, and in the fully decoupled corner lam = 1, d = 0 (e.g. Delta =
eps = 0) the G construction degenerates altogether; that corner is served by
the displaced-oscillator closed form E = n omega - g^2/omega +/- c.

Energies relate to root abscissas by E = x - lam g^2 / omega.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import oracle as _oracle
from . import series as _series
from .exceptions import NotConverged, PoleHit, SolverError
from .gfunction import EXCLUSION_WINDOW, GEvaluator, PoleRegistry, poles
from .model import ModelParams, derive_constants

__all__ = [
    "EnergyRoot",
    "SpectrumSweep",
    "BlochSiegertShifts",
    "find_roots",
    "exceptional_solutions",
    "first_crossing",
    "jc_spectrum",
    "bloch_siegert",
    "solve_spectrum",
    "energies_of",
    "sweep_levels",
]

_RESID_REL = 1e-6  # |G(root)| acceptance relative to the grid median
_IM_REL = 1e-8  # |Im G(root)| acceptance for complex G (eps != 0)
_LIFT_REL = 1e-10  # pole-lifting numerator tolerance
_DEFAULT_GRID_DENSITY = 400.0  # scan points per unit omega


@dataclass(frozen=True)
class EnergyRoot:
    """A located spectral point.

    sector is "plus"/"minus" (Z2 sectors), "eps" (broken symmetry) or
    "none" (exceptional doublets, which carry no definite parity).
    Exceptional roots are reported once with degeneracy 2.
    """

    x: float
    E: float
    sector: str
    kind: str  # "regular" | "exceptional"
    degeneracy: int
    residual_abs: float


@dataclass(frozen=True)
class SpectrumSweep:
    """Spectrum along a parameter sweep: one sorted level row per grid value."""

    sweep_parameter: str
    grid: np.ndarray
    levels: np.ndarray  # shape (len(grid), n_levels), ascending rows
    sectors: list[list[str]]
    kinds: list[list[str]]
    crossings: list[tuple[float, int, float]] = field(default_factory=list)
    # crossings: (sweep value, pole index, energy) of detected exceptional points


@dataclass(frozen=True)
class BlochSiegertShifts:
    """Counter-rotating energy corrections relative to the Jaynes-Cummings model.

    ``ground`` and ``first_excited`` are exact at the level-crossing condition
    |delta| = (1 - lam^2) g^2 / (2 omega); ``e2_jc`` is the second JC level and
    ``e3_jc_minus_e1_rabi`` the isotropic-model comparison of the third JC
    level against the exceptional first excited level (meaningful at the
    isotropic second/third-level crossing |delta| = sqrt(omega^2 - 4 g^2)).
    """

    ground: float
    first_excited: float
    e2_jc: float
    e3_jc_minus_e1_rabi: float
    at_degeneracy: bool


def first_crossing(delta: float, lam: float, omega: float = 1.0) -> tuple[float, float]:
    """Closed form (g_c, E) of the ground / first-excited level crossing."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"first crossing closed form requires 0 < lam < 1, got {lam}")
    if delta == 0.0:
        return 0.0, 0.0
    g_c = math.sqrt(2.0 * abs(delta) * omega / (1.0 - lam * lam))
    return g_c, -(1.0 + lam * lam) * g_c * g_c / (2.0 * omega)


def jc_spectrum(params: ModelParams, k: int) -> np.ndarray:
    """Lowest k Jaynes-Cummings energies (lam treated as 0; requires eps = 0).

    Ground state |0,down> at -delta; each excitation sector n >= 0 contributes
    the dressed pair (2n+1) omega/2 -/+ sqrt((delta - omega/2)^2 + (n+1) g^2).
    """
    if params.epsilon != 0.0:
        raise ValueError("Jaynes-Cummings closed forms require epsilon = 0")
    om, dl, g = params.omega, params.delta, params.g
    levels = [-dl]
    for n in range(k + 1):
        r = math.sqrt((dl - 0.5 * om) ** 2 + (n + 1) * g * g)
        mid = (2 * n + 1) * 0.5 * om
        levels.extend((mid - r, mid + r))
    return np.sort(np.array(levels))[:k]


def bloch_siegert(params: ModelParams) -> BlochSiegertShifts:
    """Closed-form gaps to the JC spectrum; warns off the degeneracy condition."""
    om, dl, g, lam = params.omega, params.delta, params.g, params.lam
    cond = (1.0 - lam * lam) * g * g / (2.0 * om)
    at_deg = abs(abs(dl) - cond) <= 1e-9 * max(om, abs(dl))
    if not at_deg:
        warnings.warn(
            f"|delta|={abs(dl):.6g} is not at the degeneracy value {cond:.6g}; "
            "the closed-form shifts are not exact here",
            stacklevel=2,
        )
    r1 = math.sqrt((dl - 0.5 * om) ** 2 + g * g)
    r2 = math.sqrt((dl - 0.5 * om) ** 2 + 2.0 * g * g)
    return BlochSiegertShifts(
        ground=lam * lam * g * g / om,
        first_excited=0.5 * om - r1 + (1.0 + lam * lam) * g * g / (2.0 * om),
        e2_jc=0.5 * om + r1,
        e3_jc_minus_e1_rabi=1.5 * om - r2 - (om - g * g / om),
        at_degeneracy=at_deg,
    )


def _pole_candidates(
    ev: GEvaluator, registry: PoleRegistry, sector: str, x_min: float, x_max: float
) -> np.ndarray:
    """Registered pole abscissas, plus (for G_eps) the normalization poles of
    the backward branch at x = n omega - Re(c), where its leading coefficient
    cannot be held at 1."""
    om = ev.params.omega
    cands = [registry.family_forward]
    if sector == "eps":
        cands.append(registry.family_backward)
        c_re = ev.constants.c.real
        n_hi = int(math.ceil((x_max + abs(c_re)) / om)) + 1
        lattice = np.arange(0, max(1, n_hi)) * om - c_re
        cands.append(lattice)
    cands = np.unique(np.concatenate(cands))
    return cands[(cands > x_min) & (cands < x_max)]


def _confirmed_poles(
    ev: GEvaluator, registry: PoleRegistry, sector: str, x_min: float, x_max: float
) -> np.ndarray:
    """Candidate poles in range at which |G| actually grows ~1/distance."""
    om = ev.params.omega
    w = EXCLUSION_WINDOW * om
    cands = _pole_candidates(ev, registry, sector, x_min - 2 * w, x_max + 2 * w)
    confirmed = []
    for p in cands:
        ratios = []
        for side in (+1.0, -1.0):
            try:
                near = abs(ev.bracket_value(p + side * w, sector))
                far = abs(ev.bracket_value(p + side * 3 * w, sector))
            except (PoleHit, NotConverged):
                ratios.append(np.inf)
                continue
            if far > 0:
                ratios.append(near / far)
            elif near > 0:
                ratios.append(np.inf)
        if ratios and max(ratios) > 1.8:
            confirmed.append(p)
    return np.array(confirmed)


def find_roots(
    params: ModelParams,
    x_min: float,
    x_max: float,
    grid_density: float = _DEFAULT_GRID_DENSITY,
    n_cap: int = _series.DEFAULT_N_CAP,
) -> list[EnergyRoot]:
    """Regular zeros of the G-functions in [x_min, x_max], sorted by x.

    Scans a uniform grid, skipping windows around numerically confirmed
    poles; sign changes of the de-phased real value are refined with Brent
    to |dx| < 1e-12 omega.  For eps != 0 a refined abscissa is accepted only
    if |Im G| there is small on the scale of the scan.  Refinements that
    stall near a pole are reported as warnings, never as exceptions.
    """
    if params.lam <= 0:
        raise ValueError("find_roots requires lam > 0 (use jc_spectrum for lam = 0)")
    if not (np.isfinite(x_min) and np.isfinite(x_max) and x_max > x_min):
        raise ValueError(f"bad scan interval [{x_min}, {x_max}]")
    om = params.omega
    ev = GEvaluator(params, n_cap=n_cap)
    registry = poles(params, n_max=max(4, int(math.ceil(x_max / om)) + 3))
    sectors = ("eps",) if params.epsilon != 0.0 else ("plus", "minus")
    window = EXCLUSION_WINDOW * om
    n_pts = max(8, int(round((x_max - x_min) * grid_density / om)) + 1)
    xs = np.linspace(x_min, x_max, n_pts)

    roots: list[EnergyRoot] = []

    def accept(x_root: float, sector: str, med: float):
        try:
            try:
                gval = ev.eps_value(x_root) if sector == "eps" else None
            except PoleHit:
                x_root += 8e-9 * om
                gval = ev.eps_value(x_root) if sector == "eps" else None
            if sector == "eps":
                if abs(gval.imag) > _IM_REL * med:
                    return
                resid = abs(gval)
            else:
                resid = abs(bracket_fn(x_root, sector))
        except (PoleHit, NotConverged):
            return
        if resid > _RESID_REL * med:
            return  # pole-adjacent sign flip, not a zero
        if any(r.sector == sector and abs(r.x - x_root) < 1e-9 * om for r in roots):
            return
        roots.append(
            EnergyRoot(
                x=x_root,
                E=x_root - params.lam * params.g**2 / om,
                sector=sector,
                kind="regular",
                degeneracy=1,
                residual_abs=resid,
            )
        )

    def bracket_fn(x: float, sector: str) -> float:
        try:
            return ev.bracket_value(x, sector)
        except PoleHit:
            # Removable-singularity sliver (width ~ guard * omega): nudge off
            # it; the residual filter decides whether the refined point is a
            # genuine zero.
            return ev.bracket_value(x + 8e-9 * om, sector)

    def refine(a: float, b: float, sector: str) -> float | None:
        try:
            return brentq(
                lambda x: bracket_fn(x, sector),
                a,
                b,
                xtol=1e-13 * om,
                rtol=4 * np.finfo(float).eps,
            )
        except (PoleHit, NotConverged, ValueError) as exc:
            warnings.warn(
                f"root refinement stalled in [{a:.9g}, {b:.9g}] "
                f"({sector} sector): {exc}; interval left unresolved",
                stacklevel=3,
            )
            return None

    for sector in sectors:
        excl = _confirmed_poles(ev, registry, sector, x_min, x_max)
        vals = np.full(n_pts, np.nan)
        for i, x in enumerate(xs):
            if len(excl) and np.min(np.abs(excl - x)) < window:
                continue
            try:
                vals[i] = ev.bracket_value(x, sector)
            except (PoleHit, NotConverged):
                continue
        med = np.nanmedian(np.abs(vals))
        if not np.isfinite(med) or med == 0.0:
            continue
        finite = np.flatnonzero(np.isfinite(vals))
        for a, b in zip(finite[:-1], finite[1:]):
            if b - a > 3:
                continue  # wide masked gap, do not bracket across it
            va, vb = vals[a], vals[b]
            if va == 0.0:
                accept(xs[a], sector, med)
            elif va * vb < 0.0:
                if len(excl) and np.any((excl > xs[a]) & (excl < xs[b])):
                    continue  # sign change caused by a confirmed pole
                x_root = refine(xs[a], xs[b], sector)
                if x_root is not None:
                    accept(x_root, sector, med)

        # Levels can hug an almost-lifted pole far inside the grid spacing
        # (and the exclusion window) close to a crossing; scan each pole
        # neighbourhood on a geometric offset ladder down to 1e-7 omega.
        if registry.complex_shift:
            continue
        step = (x_max - x_min) / (n_pts - 1)
        for p in _pole_candidates(ev, registry, sector, x_min, x_max):
            for side in (+1.0, -1.0):
                prev = None
                delta = 1e-7 * om
                while delta <= 2.0 * step:
                    x_probe = p + side * delta
                    try:
                        v = ev.bracket_value(x_probe, sector)
                    except (PoleHit, NotConverged):
                        v = None
                    if v is not None and prev is not None and prev[1] * v < 0:
                        lo, hi = sorted((prev[0], x_probe))
                        x_root = refine(lo, hi, sector)
                        if x_root is not None:
                            accept(x_root, sector, med)
                    if v is not None:
                        prev = (x_probe, v)
                    delta *= 2.0

    roots.sort(key=lambda r: r.x)
    return roots


def _lifting_numerator(params: ModelParams, n: int) -> tuple[float, float] | None:
    """De-phased pole-lifting numerator b_n K_n + c_n K_{n-1} at the n-th pole.

    Returns (value, scale) or None when the recurrence could not be driven to
    the pole order (hazard collision).  Zero value means the pole is lifted
    and an exceptional doublet sits at it.
    """
    cons = derive_constants(params)
    om = params.omega
    x_star = n * om - (1.0 - params.lam) ** 2 * params.g**2 / (2.0 * om)
    K, _, _, _, n_used, _, pole_hit, _ = _series.branch_series(
        om, params.g, params.lam, cons.xi, cons.c, cons.f, x_star,
        False, max(_series.DEFAULT_N_CAP, n + 10), 0.0, _series.DEFAULT_POLE_GUARD,
    )
    if not pole_hit or n_used != n:
        return None
    _, b, c = _series.recurrence_abc(cons, params, x_star, n, "forward")
    num = b * K[n] + (c * K[n - 1] if n >= 1 else 0.0)
    scale = abs(b * K[n]) + (abs(c * K[n - 1]) if n >= 1 else 0.0) + om
    dephased = (num * cons.xi ** (-n)).real
    return dephased, scale


def exceptional_solutions(params: ModelParams, n_range: range) -> list[EnergyRoot]:
    """Exceptional (Juddian) doublets among the poles n in n_range.

    Requires eps = 0 and 0 < lam < 1.  A pole is lifted when the recurrence
    numerator feeding K_{n+1} vanishes there; the doublet energy follows from
    the pole abscissa, E = n omega - (1 + lam^2) g^2 / (2 omega).
    """
    if params.epsilon != 0.0:
        raise ValueError("exceptional solutions require epsilon = 0")
    if not 0.0 < params.lam < 1.0:
        raise ValueError("exceptional-solution probe requires 0 < lam < 1")
    om = params.omega
    out = []
    for n in n_range:
        probe = _lifting_numerator(params, n)
        if probe is None:
            warnings.warn(
                f"could not probe pole n={n} (recurrence hazard); skipped",
                stacklevel=2,
            )
            continue
        value, scale = probe
        if abs(value) < _LIFT_REL * scale:
            x_star = n * om - (1.0 - params.lam) ** 2 * params.g**2 / (2.0 * om)
            out.append(
                EnergyRoot(
                    x=x_star,
                    E=x_star - params.lam * params.g**2 / om,
                    sector="none",
                    kind="exceptional",
                    degeneracy=2,
                    residual_abs=0.0,
                )
            )
    return out


def _decoupled_constant(params: ModelParams) -> float | None:
    """Spin-frame splitting c when the model decouples (lam = 1, d = 0)."""
    if params.lam != 1.0:
        return None
    cons = derive_constants(params)
    scale = max(abs(params.delta), abs(params.epsilon), params.omega)
    if abs(cons.d) > 1e-14 * scale:
        return None
    return cons.c.real


def _decoupled_levels(params: ModelParams, n_levels: int) -> list[EnergyRoot]:
    """Displaced-oscillator ladder for the decoupled corner lam = 1, d = 0.

    Both spin components see E = n omega - g^2/omega +/- c; at eps = 0 the
    ladder is doubly degenerate (every pole is lifted at once).
    """
    c = _decoupled_constant(params)
    assert c is not None
    om, g = params.omega, params.g
    shift = -g * g / om
    out = []
    if c == 0.0:
        for n in range(n_levels):
            e = n * om + shift
            out.append(
                EnergyRoot(
                    x=e + g * g / om, E=e, sector="none", kind="exceptional",
                    degeneracy=2, residual_abs=0.0,
                )
            )
    else:
        levels = sorted(
            (n * om + shift + s * c, s) for n in range(n_levels + 1) for s in (+1.0, -1.0)
        )[:n_levels]
        for e, _ in levels:
            out.append(
                EnergyRoot(
                    x=e + g * g / om, E=e, sector="eps", kind="regular",
                    degeneracy=1, residual_abs=0.0,
                )
            )
    return out


def _default_window(params: ModelParams, n_levels: int) -> tuple[float, float]:
    om = params.omega
    depth = abs(params.delta) + abs(params.epsilon) + ((1 + params.lam) * params.g) ** 2 / om
    x_lo = -depth - 0.5 * om + params.lam * params.g**2 / om
    x_hi = (n_levels + 1) * om + abs(params.delta) + abs(params.epsilon) + params.lam * params.g**2 / om
    return x_lo, x_hi


def solve_spectrum(
    params: ModelParams,
    n_levels: int | None = None,
    x_min: float | None = None,
    x_max: float | None = None,
    grid_density: float = _DEFAULT_GRID_DENSITY,
    include_exceptional: bool = True,
) -> list[EnergyRoot]:
    """Full spectrum in a window: regular roots merged with exceptional doublets.

    Routes lam = 0 to the Jaynes-Cummings closed forms and the decoupled
    lam = 1, d = 0 corner to its ladder; everything else goes through
    find_roots.  When ``n_levels`` is given the window is chosen (and widened
    if needed) until that many levels, counted with degeneracy, are found.
    """
    if params.lam == 0.0:
        k = n_levels if n_levels is not None else 8
        om, dl, g = params.omega, params.delta, params.g
        # Each JC level has definite parity: the ground state |0,down> is even,
        # the dressed pair of excitation sector n+1 carries parity (-1)^(n+1).
        labeled = [(-dl, "plus")]
        for n in range(k + 1):
            r = math.sqrt((dl - 0.5 * om) ** 2 + (n + 1) * g * g)
            mid = (2 * n + 1) * 0.5 * om
            sector = "minus" if (n + 1) % 2 else "plus"
            labeled.extend([(mid - r, sector), (mid + r, sector)])
        labeled.sort()
        return [
            EnergyRoot(x=e, E=e, sector=s, kind="regular",
                       degeneracy=1, residual_abs=0.0)
            for e, s in labeled[:k]
        ]
    if _decoupled_constant(params) is not None:
        k = n_levels if n_levels is not None else 8
        return _decoupled_levels(params, k)

    if n_levels is None:
        if x_min is None or x_max is None:
            raise ValueError("give either n_levels or an explicit [x_min, x_max]")
        lo, hi = x_min, x_max
    else:
        lo, hi = _default_window(params, n_levels)
        if x_min is not None:
            lo = x_min
        if x_max is not None:
            hi = x_max

    for _ in range(4):
        roots = find_roots(params, lo, hi, grid_density=grid_density)
        if include_exceptional and params.epsilon == 0.0 and 0.0 < params.lam < 1.0:
            shift = (1.0 - params.lam) ** 2 * params.g**2 / (2.0 * params.omega)
            n_hi = int(math.floor((hi + shift) / params.omega))
            n_lo = max(0, int(math.ceil((lo + shift) / params.omega)))
            if n_hi >= n_lo:
                exc = exceptional_solutions(params, range(n_lo, n_hi + 1))
                roots = sorted(roots + exc, key=lambda r: r.x)
        count = sum(r.degeneracy for r in roots)
        if n_levels is None or count >= n_levels:
            break
        hi += 2.0 * params.omega
    if n_levels is not None and count < n_levels:
        raise SolverError(
            f"found only {count} of {n_levels} requested levels in [{lo}, {hi}]"
        )
    return roots


def energies_of(roots: list[EnergyRoot], n_levels: int | None = None) -> np.ndarray:
    """Sorted energies, exceptional doublets expanded to multiplicity."""
    e = np.sort(np.repeat([r.E for r in roots], [r.degeneracy for r in roots]))
    return e[:n_levels] if n_levels is not None else e


def _oracle_row(params: ModelParams, n_levels: int, tol: float = 1e-9):
    energies, n_max = _oracle.converged_spectrum(params, n_levels, tol)
    if params.epsilon == 0.0:
        ham = _oracle.build_hamiltonian(params, n_max)
        w, v = _oracle.eigensolve(ham, n_levels)
        pdiag = _oracle.parity_diagonal(n_max)
        sectors = [
            "plus" if float(np.real(np.vdot(v[:, i], pdiag * v[:, i]))) > 0 else "minus"
            for i in range(n_levels)
        ]
    else:
        sectors = ["eps"] * n_levels
    return energies, sectors


def sweep_levels(
    params: ModelParams,
    values: np.ndarray,
    n_levels: int,
    sweep_parameter: str = "g",
    method: str = "gfunction",
) -> SpectrumSweep:
    """Lowest n_levels energies along a parameter sweep.

    Levels are tracked as sorted rows with sector labels (the sector is the
    physical disambiguator at eps = 0: within one sector levels never cross).
    For eps = 0 sweeps the pole-lifting numerator is monitored along the grid
    and its sign changes are refined to the exceptional crossing points.
    """
    values = np.asarray(values, dtype=float)
    rows, sector_rows, kind_rows = [], [], []
    for val in values:
        p = _with_param(params, sweep_parameter, float(val))
        if method == "oracle":
            energies, sectors = _oracle_row(p, n_levels)
            kinds = ["regular"] * n_levels
        else:
            roots = solve_spectrum(p, n_levels=n_levels)
            expanded = [
                (r.E, r.sector, r.kind) for r in roots for _ in range(r.degeneracy)
            ]
            expanded.sort(key=lambda t: t[0])
            expanded = expanded[:n_levels]
            energies = np.array([t[0] for t in expanded])
            sectors = [t[1] for t in expanded]
            kinds = [t[2] for t in expanded]
        rows.append(energies)
        sector_rows.append(sectors)
        kind_rows.append(kinds)

    crossings: list[tuple[float, int, float]] = []
    if (
        method == "gfunction"
        and sweep_parameter == "g"
        and params.epsilon == 0.0
        and 0.0 < params.lam < 1.0
    ):
        crossings = _sweep_crossings(params, values, n_levels)

    return SpectrumSweep(
        sweep_parameter=sweep_parameter,
        grid=values,
        levels=np.vstack(rows),
        sectors=sector_rows,
        kinds=kind_rows,
        crossings=crossings,
    )


def _with_param(params: ModelParams, name: str, value: float) -> ModelParams:
    fields = dict(
        omega=params.omega, delta=params.delta, g=params.g,
        lam=params.lam, epsilon=params.epsilon, theta=params.theta,
    )
    if name not in fields:
        raise ValueError(f"unknown sweep parameter {name!r}")
    fields[name] = value
    return ModelParams(**fields)


def _sweep_crossings(
    params: ModelParams, g_values: np.ndarray, n_levels: int
) -> list[tuple[float, int, float]]:
    """Exceptional crossings (g*, pole index, E*) inside a g sweep."""
    out = []
    g_pos = g_values[g_values > 0]
    if len(g_pos) < 2:
        return out
    for n in range(n_levels + 1):
        def dephased(g: float, n: int = n) -> float:
            probe = _lifting_numerator(_with_param(params, "g", g), n)
            return probe[0] if probe is not None else np.nan

        vals = np.array([dephased(g) for g in g_pos])
        for i in range(len(g_pos) - 1):
            if np.isnan(vals[i]) or np.isnan(vals[i + 1]):
                continue
            if vals[i] * vals[i + 1] < 0:
                try:
                    g_star = brentq(dephased, g_pos[i], g_pos[i + 1], xtol=1e-13)
                except (ValueError, ZeroDivisionError, PoleHit, NotConverged):
                    continue
                om = params.omega
                e_star = n * om - (1.0 + params.lam**2) * g_star**2 / (2.0 * om)
                out.append((g_star, n, e_star))
    out.sort()
    return out
