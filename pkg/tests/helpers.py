"""Shared test oracles, kept independent of the production code paths."""

import numpy as np


def expm1_div_series(x, t, terms=60):
    """Truncated series sum_m t^(m+1)/(m+1)! x^m."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    acc = np.zeros((n, n))
    power = np.eye(n)
    coeff = t
    for m in range(terms):
        acc = acc + coeff * power
        power = power @ x
        coeff = coeff * t / (m + 2)
    return acc


def logm_div_series(x, terms=30):
    """Truncated series sum_m (-1)^m/(m+1) (x - 1)^m."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    shifted = x - np.eye(n)
    acc = np.zeros((n, n))
    power = np.eye(n)
    for m in range(terms):
        acc = acc + ((-1) ** m / (m + 1)) * power
        power = power @ shifted
    return acc


def central_difference(f, t, h=1e-5):
    """Central finite difference of a matrix/vector-valued function."""
    return (np.asarray(f(t + h)) - np.asarray(f(t - h))) / (2 * h)


def gauss_legendre_integral(f, a, b, nodes=80):
    """Fixed-order Gauss-Legendre quadrature of a matrix-valued function."""
    xs, ws = np.polynomial.legendre.leggauss(nodes)
    mid, half = (a + b) / 2, (b - a) / 2
    total = None
    for x, w in zip(xs, ws):
        val = np.asarray(f(mid + half * x)) * (w * half)
        total = val if total is None else total + val
    return total


def fit_power_series(values, steps, order):
    """Coefficients of a polynomial in h fitted through (h_i, values_i).

    values is a list of arrays sampled at the step sizes in `steps`; returns
    the list of coefficient arrays up to `order` (a Vandermonde solve, used
    to extract series coefficients from evaluations at shrinking h).
    """
    steps = np.asarray(steps, dtype=float)
    vander = np.vander(steps, order + 1, increasing=True)
    stacked = np.stack([np.asarray(v, dtype=float) for v in values])
    flat = stacked.reshape(len(steps), -1)
    coeffs = np.linalg.solve(vander, flat)
    return [coeffs[k].reshape(stacked.shape[1:]) for k in range(order + 1)]
