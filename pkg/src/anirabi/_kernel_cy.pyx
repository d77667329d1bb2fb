# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled series kernel; contract identical to _kernel_py.branch_series.

Plain double-complex arithmetic with Kahan-compensated series sums; no
fast-math so the compensation survives.
"""

import numpy as np


def branch_series(double omega, double g, double lam,
                  double complex xi, double complex c, double complex f,
                  double x, bint backward, int n_cap, double tail_rel,
                  double pole_guard):
    cdef double sq = lam ** 0.5
    cdef double complex xis = xi.conjugate()
    cdef double complex xi2 = xi * xi
    cdef double complex fs = f.conjugate()
    cdef double one_m = 1.0 - lam
    cdef double complex y0 = sq * g * xis / omega
    cdef double base = 4.0 * lam * g * g / omega
    cdef double guard = pole_guard * omega

    K_arr = np.empty(n_cap + 1, dtype=np.complex128)
    L_arr = np.empty(n_cap if n_cap > 0 else 1, dtype=np.complex128)
    cdef double complex[::1] K = K_arr
    cdef double complex[::1] L = L_arr

    cdef double complex k_prev = 0.0
    cdef double complex k_cur = 1.0
    cdef double complex k_next, l_n, num
    cdef double complex d0, d1, d2, t_a, a_n, b_n, c_n
    cdef double complex sum_k = 0.0, sum_l = 0.0, comp_k = 0.0, comp_l = 0.0
    cdef double complex ypow = 1.0, y, t, term_k, term_l
    cdef double a1, a2, a_scale, scale
    cdef double min_den = float("inf")
    cdef int streak = 0, n_used = 0, n
    cdef bint converged = False, pole_hit = False

    K[0] = k_cur

    for n in range(n_cap):
        if backward:
            d1 = n * omega - x - c
            d2 = (n + 1) * omega - x - c
            a1 = abs(d1)
            a2 = abs(d2)
            if a1 < min_den:
                min_den = a1
            if a2 < min_den:
                min_den = a2
            if a1 < guard or a2 < guard:
                pole_hit = True
                break
            t_a = 2.0 * sq + one_m * f * xis / d2
            a_n = t_a * (n + 1) * g * xis
            a_scale = (2.0 * sq + abs(one_m * f / d2)) * (n + 1) * g
            b_n = base + n * omega - x + c - fs * f / d1 \
                - one_m * one_m * g * g * (n + 1) / d2
            if n == 0:
                num = b_n * k_cur
            else:
                c_n = -2.0 * sq * g * xi - one_m * g * fs * xi2 / d1
                num = b_n * k_cur + c_n * k_prev
            l_n = (f * k_cur + xi2 * one_m * g * k_prev) / d1
            if abs(a_n) < pole_guard * max(a_scale, 1e-30):
                pole_hit = True
                break
            k_next = num / a_n
        else:
            d1 = n * omega - x + c
            a1 = abs(d1)
            if a1 < min_den:
                min_den = a1
            if a1 < guard:
                pole_hit = True
                break
            t_a = 2.0 * sq - one_m * f * xis / d1
            a_n = t_a * (n + 1) * g * xis
            a_scale = (2.0 * sq + abs(one_m * f / d1)) * (n + 1) * g
            b_n = base + n * omega - x - c - fs * f / d1
            if n == 0:
                num = b_n * k_cur
            else:
                d0 = (n - 1) * omega - x + c
                b_n = b_n - one_m * one_m * g * g * n / d0
                c_n = -2.0 * sq * g * xi + one_m * g * fs * xi2 / d0
                num = b_n * k_cur + c_n * k_prev
            if abs(a_n) < pole_guard * max(a_scale, 1e-30):
                pole_hit = True
                break
            k_next = num / a_n
            l_n = (fs * k_cur - xis * xis * one_m * g * (n + 1) * k_next) / d1

        K[n + 1] = k_next
        L[n] = l_n

        term_k = k_cur * ypow
        term_l = l_n * ypow
        y = term_k - comp_k
        t = sum_k + y
        comp_k = (t - sum_k) - y
        sum_k = t
        y = term_l - comp_l
        t = sum_l + y
        comp_l = (t - sum_l) - y
        sum_l = t
        n_used = n + 1

        if tail_rel > 0.0:
            scale = max(abs(sum_k), abs(sum_l), 1e-30)
            if abs(term_k) <= tail_rel * scale and abs(term_l) <= tail_rel * scale:
                streak += 1
                if streak >= 8:
                    converged = True
                    break
            else:
                streak = 0

        ypow = ypow * y0
        k_prev = k_cur
        k_cur = k_next

    return (
        K_arr[: n_used + 1].copy(),
        L_arr[:n_used].copy(),
        complex(sum_k),
        complex(sum_l),
        n_used,
        converged,
        pole_hit,
        min_den,
    )
