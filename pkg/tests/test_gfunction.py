import math

import numpy as np
import pytest

from anirabi.exceptions import PoleHit
from anirabi.gfunction import GEvaluator, g_epsilon, g_parity, poles
from anirabi.model import ModelParams

SECTOR_PARAMS = ModelParams(
    omega=1.0, delta=0.4, g=0.7, lam=0.5, epsilon=0.0, theta=-math.pi / 2
)
BROKEN_SYM = ModelParams(
    omega=1.0, delta=0.4, g=0.1, lam=0.5, epsilon=0.2, theta=-math.pi / 2
)


class TestPoleRegistry:
    def test_isotropic_poles_at_integers(self):
        reg = poles(ModelParams(omega=1.0, delta=0.4, g=0.5, lam=1.0), 5)
        assert np.allclose(reg.family_forward, np.arange(6), atol=1e-15)
        assert np.allclose(reg.family_backward, np.arange(1, 7), atol=1e-15)

    def test_symmetric_offset(self):
        reg = poles(ModelParams(omega=1.0, delta=0.4, g=0.7, lam=0.5), 5)
        assert np.allclose(reg.family_forward, np.arange(6) - 0.06125, atol=1e-15)
        assert np.allclose(reg.family_backward, np.arange(1, 7) - 0.06125, atol=1e-15)
        assert not reg.complex_shift
        assert np.all(np.diff(reg.family_forward) > 0)
        assert np.all(np.diff(reg.family_backward) > 0)

    def test_complex_shift_flagged(self):
        reg = poles(BROKEN_SYM, 4)
        # (xi + lam xi*) eps / (2 sqrt(lam)) at theta=-pi/2, lam=1/2, eps=0.2
        assert reg.shift_eps == pytest.approx(0.15 - 0.05j, abs=1e-15)
        assert reg.complex_shift
        shift_g = (1 - 0.5) ** 2 * 0.1**2 / 2.0
        assert np.allclose(
            reg.family_forward, np.arange(5) - shift_g + 0.15, atol=1e-14
        )
        assert np.allclose(
            reg.family_backward, np.arange(1, 6) - shift_g - 0.15, atol=1e-14
        )

    def test_requires_positive_lam(self):
        with pytest.raises(ValueError):
            poles(ModelParams(omega=1.0, delta=0.4, g=0.5, lam=0.0), 3)


class TestSimplePoles:
    def test_growth_exponent_is_minus_one(self):
        ev = GEvaluator(ModelParams(omega=1.0, delta=0.4, g=0.7, lam=0.5))
        pole = 1.0 - 0.06125
        dists = np.array([10 ** (-k) for k in np.linspace(2.6, 4.4, 7)])
        mags = np.array([abs(ev.parity_value(pole + d, "plus")) for d in dists])
        slope = np.polyfit(np.log(dists), np.log(mags), 1)[0]
        assert -1.2 < slope < -0.8


class TestGEpsilon:
    def test_finite_between_poles(self):
        reg = poles(BROKEN_SYM, 6)
        mids = 0.5 * (reg.family_forward[:-1] + reg.family_forward[1:])
        for x in mids:
            gv = g_epsilon(BROKEN_SYM, float(x))
            assert gv.value is not None
            assert np.isfinite(gv.value.real) and np.isfinite(gv.value.imag)
            assert gv.sector == "eps"

    def test_real_at_zero_bias_any_phase(self):
        # with the Z2 symmetry intact G_eps is real even for complex couplings
        for x in np.linspace(0.1, 0.8, 7):
            gv = g_epsilon(SECTOR_PARAMS, float(x))
            assert abs(gv.value.imag) < 1e-12 * max(abs(gv.value.real), 1e-30)

    def test_near_pole_flag(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.7, lam=0.5)
        gv = g_epsilon(p, 0.93875 + 3e-5)
        assert gv.near_pole

    def test_zeros_are_union_of_sector_zeros(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.7, lam=0.5)
        ev = GEvaluator(p)
        xs = np.linspace(-0.5, 2.5, 1201)
        def signs(fn):
            vals = []
            for x in xs:
                try:
                    vals.append(fn(float(x)))
                except PoleHit:
                    vals.append(np.nan)
            return np.array(vals)
        v_eps = signs(lambda x: ev.eps_value(x).real)
        v_p = signs(lambda x: ev.bracket_value(x, "plus"))
        v_m = signs(lambda x: ev.bracket_value(x, "minus"))
        # registered poles plus the normalization poles of the backward
        # branch at x = n - Re(c); both flip the sign of G_eps
        c_re = 2.0 / 15.0
        pole_xs = np.concatenate([np.arange(-1, 4) - 0.06125, np.arange(0, 4) - c_re])
        step = xs[1] - xs[0]
        for i in range(len(xs) - 1):
            if np.isnan(v_eps[i]) or np.isnan(v_eps[i + 1]):
                continue
            if v_eps[i] * v_eps[i + 1] < 0:
                x_mid = 0.5 * (xs[i] + xs[i + 1])
                if np.min(np.abs(pole_xs - x_mid)) < 2 * step:
                    continue  # pole sign flip, shared by the sector functions
                near_p = any(
                    v_p[j] * v_p[j + 1] < 0
                    for j in range(max(0, i - 2), min(len(xs) - 1, i + 3))
                )
                near_m = any(
                    v_m[j] * v_m[j + 1] < 0
                    for j in range(max(0, i - 2), min(len(xs) - 1, i + 3))
                )
                assert near_p or near_m


class TestGParity:
    def test_rejects_broken_symmetry(self):
        with pytest.raises(ValueError):
            g_parity(BROKEN_SYM, 0.3, "plus")

    def test_rejects_unknown_sector(self):
        with pytest.raises(ValueError):
            g_parity(SECTOR_PARAMS, 0.3, "middle")

    def test_plus_sector_real(self):
        for theta in (0.0, -math.pi / 2):
            p = ModelParams(omega=1.0, delta=0.4, g=0.7, lam=0.5, theta=theta)
            for x in np.linspace(0.05, 0.85, 9):
                gv = g_parity(p, float(x), "plus")
                assert abs(gv.value.imag) < 1e-12 * max(abs(gv.value.real), 1e-30)

    def test_minus_sector_constant_phase(self):
        # G_minus carries the global phase xi*: re-phased it is real
        p = SECTOR_PARAMS
        ev = GEvaluator(p)
        xi = np.exp(1j * p.theta / 2)
        for x in np.linspace(0.05, 0.85, 9):
            v = xi * ev.parity_value(float(x), "minus")
            assert abs(v.imag) < 1e-12 * max(abs(v.real), 1e-30)

    def test_pole_masked_value(self):
        gv = g_parity(
            ModelParams(omega=1.0, delta=0.4, g=0.7, lam=0.5),
            -0.06125,
            "plus",
        )
        assert gv.near_pole and gv.value is None
