import math

import numpy as np
import pytest

from anirabi.model import ModelParams
from anirabi.oracle import build_hamiltonian, converged_spectrum, eigensolve
from anirabi.spectrum import (
    bloch_siegert,
    energies_of,
    exceptional_solutions,
    find_roots,
    first_crossing,
    jc_spectrum,
    solve_spectrum,
    sweep_levels,
)

G_CROSS = 4.0 / math.sqrt(15.0)
BROKEN_SYM = ModelParams(
    omega=1.0, delta=0.4, g=0.1, lam=0.5, epsilon=0.2, theta=-math.pi / 2
)


class TestFindRoots:
    def test_broken_symmetry_matches_diagonalization(self):
        roots = find_roots(BROKEN_SYM, -1.0, 4.0)
        energies = energies_of(roots)
        ref = eigensolve(build_hamiltonian(BROKEN_SYM, 60), len(energies))[0]
        assert np.max(np.abs(energies - ref)) < 1e-8

    def test_weak_coupling_approaches_decoupled_ladder(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.02, lam=0.5)
        energies = energies_of(solve_spectrum(p, n_levels=4), 4)
        assert np.allclose(energies, [-0.4, 0.4, 0.6, 1.4], atol=5e-3)
        ref = converged_spectrum(p, 4, 1e-11)[0]
        assert np.max(np.abs(energies - ref)) < 1e-8

    def test_interval_validation(self):
        with pytest.raises(ValueError):
            find_roots(BROKEN_SYM, 2.0, 1.0)
        with pytest.raises(ValueError):
            find_roots(ModelParams(omega=1.0, delta=0.4, g=0.5, lam=0.0), 0.0, 1.0)


class TestFirstCrossing:
    def test_reference_values(self):
        g_c, e_c = first_crossing(0.4, 0.5, 1.0)
        assert g_c == pytest.approx(1.0327955589886444, abs=1e-15)
        assert e_c == pytest.approx(-2.0 / 3.0, abs=1e-15)

    def test_energy_identity(self):
        # E = -(1 + lam^2) g_c^2 / (2 omega), evaluated by hand at lam=1/2
        g_c, e_c = first_crossing(0.4, 0.5, 1.0)
        assert e_c == pytest.approx(-(1 + 0.25) * (16.0 / 15.0) / 2.0, abs=1e-15)

    def test_vanishing_splitting(self):
        assert first_crossing(0.0, 0.5, 1.0) == (0.0, 0.0)

    def test_isotropic_limit_diverges(self):
        g_c, _ = first_crossing(0.4, 0.999, 1.0)
        assert g_c > 15.0
        with pytest.raises(ValueError):
            first_crossing(0.4, 1.0, 1.0)
        with pytest.raises(ValueError):
            first_crossing(0.4, 0.0, 1.0)


class TestExceptional:
    def test_first_crossing_doublet(self):
        p = ModelParams(omega=1.0, delta=0.4, g=G_CROSS, lam=0.5)
        found = exceptional_solutions(p, range(0, 3))
        assert len(found) == 1
        root = found[0]
        assert root.kind == "exceptional" and root.degeneracy == 2
        assert root.E == pytest.approx(-2.0 / 3.0, abs=1e-12)
        # the two lowest exact levels collapse onto the doublet
        w = eigensolve(build_hamiltonian(p, 80), 2)[0]
        assert abs(w[1] - w[0]) < 1e-9
        assert abs(w[0] - root.E) < 1e-9

    def test_absent_off_crossing(self):
        for g in (G_CROSS - 0.01, G_CROSS + 0.01):
            p = ModelParams(omega=1.0, delta=0.4, g=g, lam=0.5)
            assert exceptional_solutions(p, range(0, 1)) == []

    def test_excited_level_crossing(self):
        # located by the sweep detector; the exact spectrum degenerates there
        p = ModelParams(omega=1.0, delta=0.4, g=0.91160022023030229, lam=0.5)
        found = exceptional_solutions(p, range(0, 4))
        assert len(found) == 1
        assert found[0].E == pytest.approx(1.4806156490475402, abs=1e-10)
        w = converged_spectrum(p, 6, 1e-11)[0]
        assert abs(w[5] - w[4]) < 1e-9
        assert abs(w[4] - found[0].E) < 1e-8

    def test_preconditions(self):
        with pytest.raises(ValueError):
            exceptional_solutions(BROKEN_SYM, range(2))
        with pytest.raises(ValueError):
            exceptional_solutions(
                ModelParams(omega=1.0, delta=0.4, g=0.5, lam=1.0), range(2)
            )


class TestJaynesCummings:
    def test_decoupled_limit(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.0, lam=0.0)
        assert np.allclose(jc_spectrum(p, 5), [-0.4, 0.4, 0.6, 1.4, 1.6], atol=1e-15)

    def test_vacuum_level_is_flat(self):
        # |0,down> stays an exact eigenstate at -delta for every coupling
        # (at strong coupling the lower polariton dives below it, so it is
        # present in the spectrum rather than necessarily first)
        for g in (0.0, 0.3, 0.9):
            p = ModelParams(omega=1.0, delta=0.4, g=g, lam=0.0)
            w = jc_spectrum(p, 4)
            assert np.min(np.abs(w - (-0.4))) < 1e-14

    def test_resonant_splitting(self):
        # at delta = omega/2 each dressed pair splits by 2 g sqrt(n+1)
        g = 0.13
        p = ModelParams(omega=1.0, delta=0.5, g=g, lam=0.0)
        w = jc_spectrum(p, 7)
        for n in range(3):
            lo, hi = w[1 + 2 * n], w[2 + 2 * n]
            assert hi - lo == pytest.approx(2 * g * math.sqrt(n + 1), abs=1e-12)

    def test_matches_diagonalization(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.35, lam=0.0)
        ref = converged_spectrum(p, 6, 1e-12)[0]
        assert np.max(np.abs(jc_spectrum(p, 6) - ref)) < 1e-9

    def test_rejects_broken_symmetry(self):
        with pytest.raises(ValueError):
            jc_spectrum(BROKEN_SYM, 4)


class TestBlochSiegert:
    def test_limits(self):
        p0 = ModelParams(omega=1.0, delta=0.0, g=0.2, lam=0.0)
        with pytest.warns(UserWarning):  # delta=0 is off the lam=0 condition
            assert bloch_siegert(p0).ground == 0.0
        p1 = ModelParams(omega=1.0, delta=0.0, g=0.2, lam=1.0)
        assert bloch_siegert(p1).ground == pytest.approx(0.04, abs=1e-15)

    def test_ground_energy_identity(self):
        # at the degeneracy condition the solver ground energy equals
        # -(1 + lam^2) g^2 / (2 omega) and sits lam^2 g^2/omega below the
        # Jaynes-Cummings ground level -delta
        lam, g = 0.5, 0.2
        delta = (1 - lam * lam) * g * g / 2.0
        p = ModelParams(omega=1.0, delta=delta, g=g, lam=lam)
        shifts = bloch_siegert(p)
        assert shifts.at_degeneracy
        target = -(1 + lam * lam) * g * g / 2.0
        e0 = energies_of(solve_spectrum(p, n_levels=2), 1)[0]
        assert e0 == pytest.approx(target, abs=1e-9)
        assert -delta - e0 == pytest.approx(shifts.ground, abs=1e-9)
        ref = converged_spectrum(p, 1, 1e-11)[0][0]
        assert e0 == pytest.approx(ref, abs=1e-9)

    def test_warns_off_condition(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.2, lam=0.5)
        with pytest.warns(UserWarning, match="degeneracy"):
            bloch_siegert(p)

    def test_higher_level_forms(self):
        p = ModelParams(omega=1.0, delta=0.015, g=0.2, lam=0.5)
        s = bloch_siegert(p)
        r1 = math.sqrt((0.015 - 0.5) ** 2 + 0.04)
        assert s.e2_jc == pytest.approx(0.5 + r1, abs=1e-15)
        assert s.first_excited == pytest.approx(0.5 - r1 + 1.25 * 0.04 / 2, abs=1e-15)
        r2 = math.sqrt((0.015 - 0.5) ** 2 + 0.08)
        assert s.e3_jc_minus_e1_rabi == pytest.approx(1.5 - r2 - (1 - 0.04), abs=1e-15)


class TestDecoupledCorner:
    def test_isotropic_zero_splitting_ladder(self):
        # lam=1, delta=0, eps=0: every level is a doubly degenerate
        # displaced-oscillator state at n omega - g^2/omega
        p = ModelParams(omega=1.0, delta=0.0, g=0.2, lam=1.0)
        roots = solve_spectrum(p, n_levels=6)
        assert all(r.degeneracy == 2 for r in roots)
        energies = energies_of(roots, 6)
        expected = np.repeat(np.arange(3) - 0.04, 2)
        assert np.allclose(energies, expected, atol=1e-12)
        ref = converged_spectrum(p, 6, 1e-11)[0]
        assert np.max(np.abs(energies - ref)) < 1e-9


class TestPhaseInvariance:
    def test_roots_independent_of_phase(self):
        base = dict(omega=1.0, delta=0.4, g=0.7, lam=0.5, epsilon=0.0)
        r0 = energies_of(solve_spectrum(ModelParams(**base, theta=0.0), n_levels=6), 6)
        r1 = energies_of(
            solve_spectrum(ModelParams(**base, theta=-math.pi / 2), n_levels=6), 6
        )
        assert np.max(np.abs(r0 - r1)) < 1e-10


class TestSweeps:
    def test_no_same_sector_crossing(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.5, lam=0.5)
        grid = np.linspace(0.2, 1.4, 13)
        sweep = sweep_levels(p, grid, 6)
        # within one sector the sorted levels form continuous curves
        for sector in ("plus", "minus"):
            prev = None
            for i in range(len(grid)):
                row = [
                    sweep.levels[i, j]
                    for j in range(6)
                    if sweep.sectors[i][j] == sector
                ]
                if prev is not None and len(prev) == len(row):
                    jumps = np.abs(np.array(row) - np.array(prev))
                    assert np.max(jumps) < 0.25
                prev = row

    def test_crossing_detection(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.5, lam=0.5)
        sweep = sweep_levels(p, np.linspace(0.8, 1.2, 5), 4)
        g_stars = [c[0] for c in sweep.crossings]
        assert any(abs(gs - G_CROSS) < 1e-10 for gs in g_stars)
        n0 = [c for c in sweep.crossings if abs(c[0] - G_CROSS) < 1e-10][0]
        assert n0[2] == pytest.approx(-2.0 / 3.0, abs=1e-10)

    def test_broken_symmetry_lifts_degeneracies(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.5, lam=0.5, epsilon=0.2,
                        theta=-math.pi / 2)
        grid = np.linspace(0.05, 1.0, 9)
        sweep = sweep_levels(p, grid, 6)
        min_gap = np.min(np.diff(sweep.levels, axis=1))
        assert min_gap > 1e-4

    def test_oracle_method_agrees(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.5, lam=0.5)
        grid = np.array([0.3, 0.9])
        a = sweep_levels(p, grid, 4)
        b = sweep_levels(p, grid, 4, method="oracle")
        assert np.max(np.abs(a.levels - b.levels)) < 1e-7
        assert a.sectors == b.sectors


@pytest.mark.parametrize("lam", [0.3, 1.0])
@pytest.mark.parametrize("epsilon,theta", [(0.0, 0.0), (0.2, 0.0), (0.2, -math.pi / 2)])
@pytest.mark.parametrize("g", [0.1, 0.7, 1.5])
def test_solver_equivalence_grid(lam, epsilon, theta, g):
    """Every G-function energy below 5 omega matches the converged
    diagonalization to 1e-7 across coupling regimes."""
    p = ModelParams(omega=1.0, delta=0.4, g=g, lam=lam, epsilon=epsilon, theta=theta)
    roots = [r for r in solve_spectrum(p, x_min=-2.5, x_max=5.5 + lam * g * g) if r.E < 5.0]
    energies = energies_of(roots)
    ref = converged_spectrum(p, len(energies) + 2, 1e-9)[0]
    assert len(energies) >= 5
    assert np.max(np.abs(energies - ref[: len(energies)])) < 1e-7


class TestJaynesCummingsRouting:
    def test_solve_spectrum_routes_lam_zero(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.35, lam=0.0)
        roots = solve_spectrum(p, n_levels=6)
        energies = energies_of(roots, 6)
        assert np.allclose(energies, jc_spectrum(p, 6), atol=1e-14)
        # parity labels against the diagonalization eigenvectors
        ham = build_hamiltonian(p, 60)
        w, v = eigensolve(ham, 6)
        from anirabi.oracle import parity_diagonal

        pdiag = parity_diagonal(60)
        for i, root in enumerate(roots):
            par = float(np.real(np.vdot(v[:, i], pdiag * v[:, i])))
            assert (par > 0.99) == (root.sector == "plus")
