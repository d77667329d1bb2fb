import math

import numpy as np
import pytest

from anirabi import _kernel_py
from anirabi._backend import BACKEND
from anirabi.exceptions import NotConverged, PoleHit
from anirabi.model import ModelParams, derive_constants
from anirabi.series import (
    backward_coefficients,
    eval_phi,
    forward_coefficients,
    recurrence_abc,
    series_point,
)

Z2_PARAMS = ModelParams(omega=1.0, delta=0.4, g=0.7, lam=0.5, epsilon=0.0, theta=0.0)
G_CROSS = 4.0 / math.sqrt(15.0)


def tables(params, x, **kw):
    cons = derive_constants(params)
    return (
        forward_coefficients(cons, params, x, **kw),
        backward_coefficients(cons, params, x, **kw),
    )


class TestRecurrenceBasics:
    def test_leading_coefficient_is_one(self):
        for x in (-0.3, 0.42, 1.7):
            fwd, bwd = tables(Z2_PARAMS, x)
            assert fwd.K[0] == 1.0
            assert bwd.K[0] == 1.0

    def test_isotropic_limit_coefficients(self):
        # at lam=1, theta=0, eps=0 the raw coefficients collapse to
        # a_n = 2(n+1)g and c_n = -2g
        p = ModelParams(omega=1.0, delta=0.4, g=0.6, lam=1.0)
        cons = derive_constants(p)
        for n in range(1, 6):
            a, b, c = recurrence_abc(cons, p, 0.37, n)
            assert a == pytest.approx(2 * (n + 1) * p.g, abs=1e-14)
            assert c == pytest.approx(-2 * p.g, abs=1e-14)

    def test_isotropic_limit_against_independent_recurrence(self):
        # independent isotropic-limit recurrence:
        #   (n+1) K_{n+1} = f_n(x) K_n - K_{n-1},
        #   f_n(x) = 2g + (1/2g)(n w - x + D^2/(x - n w))
        p = ModelParams(omega=1.0, delta=0.4, g=0.6, lam=1.0)
        x = 0.37
        k_ind = [1.0]
        prev, cur = 0.0, 1.0
        for n in range(0, 12):
            f_n = 2 * p.g + (n * p.omega - x + p.delta**2 / (x - n * p.omega)) / (2 * p.g)
            nxt = (f_n * cur - prev) / (n + 1)
            k_ind.append(nxt)
            prev, cur = cur, nxt
        fwd = tables(p, x)[0]
        for n in range(12):
            assert fwd.K[n].real == pytest.approx(k_ind[n], rel=1e-10)
            assert fwd.K[n].imag == 0.0

    def test_isotropic_backward_coefficient(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.6, lam=1.0)
        cons = derive_constants(p)
        for n in range(4):
            a, _, _ = recurrence_abc(cons, p, 0.37, n, "backward")
            assert a == pytest.approx(2 * (n + 1) * p.g, abs=1e-14)

    def test_real_coefficients_for_real_problem(self):
        fwd, bwd = tables(Z2_PARAMS, 0.53)
        for table in (fwd, bwd):
            assert np.max(np.abs(table.K.imag)) < 1e-13 * np.max(np.abs(table.K.real))
            assert np.max(np.abs(table.L.imag)) < 1e-13 * np.max(np.abs(table.L.real))

    def test_rejects_jc_limit(self):
        p = ModelParams(omega=1.0, delta=0.4, g=0.5, lam=0.0)
        with pytest.raises(ValueError):
            forward_coefficients(None, p, 0.3)


class TestPoleBehaviour:
    def test_pole_hit_at_first_pole(self):
        x_pole = -((1 - 0.5) ** 2) * Z2_PARAMS.g**2 / 2.0
        with pytest.raises(PoleHit):
            forward_coefficients(derive_constants(Z2_PARAMS), Z2_PARAMS, x_pole)

    def test_crossing_point_zeroes_both_coefficients(self):
        # at the first crossing the K-step divisor and driver vanish together
        p = ModelParams(omega=1.0, delta=0.4, g=G_CROSS, lam=0.5)
        cons = derive_constants(p)
        x0 = -((1 - p.lam) ** 2) * p.g**2 / (2 * p.omega)
        a0, b0, _ = recurrence_abc(cons, p, x0, 0)
        assert abs(a0) < 1e-13
        assert abs(b0) < 1e-13

    def test_terminated_series_ratio_at_crossing(self):
        # the order-zero companion coefficient equals 2 sqrt(lam)/(1-lam)
        p = ModelParams(omega=1.0, delta=0.4, g=G_CROSS, lam=0.5)
        cons = derive_constants(p)
        x0 = -((1 - p.lam) ** 2) * p.g**2 / (2 * p.omega)
        l0 = cons.f.conjugate() / (cons.c - x0)
        assert l0.real == pytest.approx(2 * math.sqrt(2), abs=1e-12)
        assert l0.imag == 0.0

    def test_backward_pole_family(self):
        cons = derive_constants(Z2_PARAMS)
        shift = (1 - 0.5) ** 2 * 0.49 / 2
        for n in range(3):
            x_pole = (n + 1) * 1.0 - shift
            a, _, _ = recurrence_abc(cons, Z2_PARAMS, x_pole, n, "backward")
            assert abs(a) < 1e-12


class TestSeriesSums:
    def test_truncation_stability(self):
        # forcing the full coefficient budget changes nothing measurable
        for g in (0.2, 1.0):
            for lam in (0.5, 1.0):
                p = ModelParams(omega=1.0, delta=0.4, g=g, lam=lam)
                point = series_point(p)
                for x in np.linspace(-0.9, 5.9, 23):
                    try:
                        short = tables(p, x)
                        long = tables(p, x, n_cap=500)
                    except PoleHit:
                        continue
                    for t_short, t_long in zip(short, long):
                        a = eval_phi(t_short, point)
                        b = (
                            _sum_all(t_long, point)
                        )
                        scale = max(abs(b[0]), abs(b[1]))
                        assert abs(a[0] - b[0]) < 1e-10 * scale
                        assert abs(a[1] - b[1]) < 1e-10 * scale

    def test_weak_coupling_limit(self):
        # evaluated on the decoupling-limit ground abscissa x -> -delta,
        # where the solution tends to the bare vacuum component
        p = ModelParams(omega=1.0, delta=0.4, g=1e-4, lam=0.5)
        fwd = tables(p, -p.delta)[0]
        phi1, phi2 = eval_phi(fwd, series_point(p))
        assert phi2 == pytest.approx(1.0, abs=1e-3)

    def test_eval_rejects_unconverged(self):
        with pytest.raises((NotConverged, PoleHit)):
            fwd = tables(Z2_PARAMS, 0.53, n_cap=5)[0]
            eval_phi(fwd, series_point(Z2_PARAMS))


def _sum_all(table, point):
    n = table.n_used
    powers = point.y ** np.arange(n)
    return (
        point.prefactor * np.sum((table.L[:n] if table.branch == "forward" else table.K[:n]) * powers),
        point.prefactor * np.sum((table.K[:n] if table.branch == "forward" else table.L[:n]) * powers),
    )


class TestDifferentialEquations:
    """The summed series must solve the coupled first-order equations the
    recurrences came from, at any trial x (eigenvalue or not)."""

    @pytest.mark.parametrize(
        "params,x",
        [
            (Z2_PARAMS, 0.53),
            (ModelParams(omega=1.0, delta=0.4, g=0.4, lam=0.8,
                         epsilon=0.2, theta=-math.pi / 2), 0.41),
            (ModelParams(omega=1.3, delta=-0.3, g=0.6, lam=1.1,
                         epsilon=-0.1, theta=0.7), 1.1),
        ],
    )
    def test_forward_branch(self, params, x):
        cons = derive_constants(params)
        fwd = forward_coefficients(cons, params, x)
        energy = x - params.lam * params.g**2 / params.omega
        h = 1e-6
        sq = math.sqrt(params.lam)
        for z0 in (0.0, 0.01 + 0.005j, -0.02j):
            phi = {dz: eval_phi(fwd, series_point(params, z0 + dz)) for dz in (-h, 0, h)}
            d1 = (phi[h][0] - phi[-h][0]) / (2 * h)
            d2 = (phi[h][1] - phi[-h][1]) / (2 * h)
            p1, p2 = phi[0]
            w, g = params.omega, params.g
            xi, xis = cons.xi, cons.xi.conjugate()
            r1 = (
                w * z0 * d1 + sq * g * (xis * d1 + xi * z0 * p1) + cons.c * p1
                + xis * xis * (1 - params.lam) * g * d2 - np.conj(cons.d) * p2
                - energy * p1
            )
            r2 = (
                (xi * xi * (1 - params.lam) * g * z0 - cons.d) * p1
                + w * z0 * d2 - sq * g * (xis * d2 + xi * z0 * p2) - cons.c * p2
                - energy * p2
            )
            scale = max(abs(energy) * max(abs(p1), abs(p2)), 1.0)
            assert abs(r1) < 1e-6 * scale
            assert abs(r2) < 1e-6 * scale

    def test_backward_branch(self):
        params = Z2_PARAMS
        x = 0.53
        cons = derive_constants(params)
        bwd = backward_coefficients(cons, params, x)
        energy = x - params.lam * params.g**2 / params.omega
        h = 1e-6
        sq = math.sqrt(params.lam)
        for z0 in (0.0, 0.013):
            phi = {dz: eval_phi(bwd, series_point(params, z0 + dz)) for dz in (-h, 0, h)}
            d1 = (phi[h][0] - phi[-h][0]) / (2 * h)
            d2 = (phi[h][1] - phi[-h][1]) / (2 * h)
            p1, p2 = phi[0]
            w, g = params.omega, params.g
            xi, xis = cons.xi, cons.xi.conjugate()
            r1 = (
                w * z0 * d1 - sq * g * (xis * d1 + xi * z0 * p1) + cons.c * p1
                - xis * xis * (1 - params.lam) * g * d2 - np.conj(cons.d) * p2
                - energy * p1
            )
            r2 = (
                (-xi * xi * (1 - params.lam) * g * z0 - cons.d) * p1
                + w * z0 * d2 + sq * g * (xis * d2 + xi * z0 * p2) - cons.c * p2
                - energy * p2
            )
            scale = max(abs(energy) * max(abs(p1), abs(p2)), 1.0)
            assert abs(r1) < 1e-6 * scale
            assert abs(r2) < 1e-6 * scale


@pytest.mark.skipif(BACKEND != "compiled", reason="compiled kernel not built")
def test_backends_agree():
    from anirabi import _kernel_cy

    rng = np.random.default_rng(17)
    for _ in range(60):
        p = ModelParams(
            omega=rng.uniform(0.5, 2.0),
            delta=rng.uniform(-1, 1),
            g=rng.uniform(0.05, 1.5),
            lam=rng.uniform(0.05, 1.3),
            epsilon=rng.uniform(-0.5, 0.5),
            theta=rng.uniform(-math.pi, math.pi),
        )
        cons = derive_constants(p)
        x = rng.uniform(-1.0, 5.0)
        for backward in (False, True):
            f = cons.fbar if backward else cons.f
            args = (p.omega, p.g, p.lam, cons.xi, cons.c, f, x, backward, 250, 1e-14, 1e-9)
            ka, la, ska, sla, na, ca, pa, da = _kernel_py.branch_series(*args)
            kb, lb, skb, slb, nb, cb, pb, db = _kernel_cy.branch_series(*args)
            assert (na, ca, pa) == (nb, cb, pb)
            if not pa and ca:
                assert abs(ska - skb) <= 1e-13 * max(abs(ska), 1e-30)
                assert abs(sla - slb) <= 1e-13 * max(abs(sla), 1e-30)
                assert np.allclose(ka, kb, rtol=1e-12, atol=0)
