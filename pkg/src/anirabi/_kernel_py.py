"""Pure-Python series kernel (fallback for the compiled extension).

Runs one solution branch of the coupled Bargmann eigenproblem at a trial
spectral parameter x: the three-term recurrence for the K coefficients, the
companion L coefficients, and the compensated sums of both power series at
z = 0 (series variable y0 = sqrt(lam) g xi*/omega).

Both kernels implement the identical contract::

    branch_series(omega, g, lam, xi, c, f, x, backward, n_cap, tail_rel,
                  pole_guard)
      -> (K, L, sum_K, sum_L, n_used, converged, pole_hit, min_den)

K has one lookahead entry (length n_used + 1), L has length n_used.
``converged`` means both series passed the tail test (|term| <= tail_rel *
max(|sum_K|, |sum_L|) for 8 consecutive orders); ``pole_hit`` that a
recurrence denominator or the K-step divisor fell under the guard, in which
case the sums are invalid and x should be treated as a pole candidate.
A ``tail_rel`` of 0 disables the tail test (used to force the recurrence up
to a prescribed order when probing pole numerators).
"""

import numpy as np

_CONSECUTIVE_OK = 8
_SUM_FLOOR = 1e-30


def branch_series(omega, g, lam, xi, c, f, x, backward, n_cap, tail_rel, pole_guard):
    sq = lam**0.5
    xis = xi.conjugate()
    xi2 = xi * xi
    fs = f.conjugate()
    one_m = 1.0 - lam
    y0 = sq * g * xis / omega
    base = 4.0 * lam * g * g / omega
    guard = pole_guard * omega

    K = np.empty(n_cap + 1, dtype=complex)
    L = np.empty(n_cap, dtype=complex)
    k_prev = 0.0 + 0.0j
    k_cur = 1.0 + 0.0j
    K[0] = k_cur

    sum_k = 0.0 + 0.0j
    sum_l = 0.0 + 0.0j
    comp_k = 0.0 + 0.0j
    comp_l = 0.0 + 0.0j
    ypow = 1.0 + 0.0j
    streak = 0
    n_used = 0
    converged = False
    pole_hit = False
    min_den = np.inf

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
            b_n = base + n * omega - x + c - fs * f / d1 - one_m**2 * g * g * (n + 1) / d2
            if n == 0:
                num = b_n * k_cur
            else:
                c_n = -2.0 * sq * g * xi - one_m * g * fs * xi2 / d1
                num = b_n * k_cur + c_n * k_prev
            l_n = (f * k_cur + xi2 * one_m * g * k_prev) / d1
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
                b_n -= one_m**2 * g * g * n / d0
                c_n = -2.0 * sq * g * xi + one_m * g * fs * xi2 / d0
                num = b_n * k_cur + c_n * k_prev
        if abs(a_n) < pole_guard * max(a_scale, 1e-30):
            pole_hit = True
            break
        k_next = num / a_n
        if not backward:
            l_n = (fs * k_cur - xis * xis * one_m * g * (n + 1) * k_next) / d1

        K[n + 1] = k_next
        L[n] = l_n

        term_k = k_cur * ypow
        term_l = l_n * ypow
        # Kahan-compensated accumulation of both series.
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
            scale = max(abs(sum_k), abs(sum_l), _SUM_FLOOR)
            if abs(term_k) <= tail_rel * scale and abs(term_l) <= tail_rel * scale:
                streak += 1
                if streak >= _CONSECUTIVE_OK:
                    converged = True
                    break
            else:
                streak = 0

        ypow = ypow * y0
        k_prev = k_cur
        k_cur = k_next

    return (
        K[: n_used + 1].copy(),
        L[:n_used].copy(),
        sum_k,
        sum_l,
        n_used,
        converged,
        pole_hit,
        min_den,
    )
