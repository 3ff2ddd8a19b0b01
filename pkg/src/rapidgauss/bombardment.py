"""Power series of the interpolation generators in the step duration.

For a bombardment setup the reduced channel is analytic in dt, and the
interpolation generators inherit a series A = A_0 + dt A_1 + ..., with
closed forms for the first three orders and a mechanical construction
(composition of the logarithm series with the channel series) for the rest.
The even-order A coefficients are symmetric (unitary effects), the odd ones
antisymmetric (non-unitary effects).

Also houses the purification predicates: whether a generator can increase
purity at all, and whether a coupling can do so at leading order.
"""

from dataclasses import dataclass

import numpy as np

from .channels import channel_taylor
from .errors import MalformedSeriesError
from .interpolation import Generators, cp_differential_check
from .linalg import tensor_product
from .phasespace import symplectic_form

PURIFY_TOL = 1e-12


@dataclass(frozen=True)
class GeneratorSeries:
    """Per-order generator coefficients {A_k, b_k, C_k}, k = 0..order."""

    A: tuple
    b: tuple
    C: tuple

    def __post_init__(self):
        freeze = lambda seq: tuple(np.ascontiguousarray(m, dtype=float) for m in seq)
        object.__setattr__(self, "A", freeze(self.A))
        object.__setattr__(self, "b", freeze(self.b))
        object.__setattr__(self, "C", freeze(self.C))
        if not len(self.A) == len(self.b) == len(self.C) or not self.A:
            raise MalformedSeriesError("A, b, C must have one entry per order")
        for m in self.A:
            m.setflags(write=False)
        for m in self.b:
            m.setflags(write=False)
        for m in self.C:
            m.setflags(write=False)

    @property
    def order(self):
        return len(self.A) - 1

    def truncate(self, order, dt):
        """Partial sum sum_k coeff_k dt^k up to the given order, as Generators."""
        if order > self.order:
            raise ValueError(f"series only carries orders up to {self.order}")
        a = sum(self.A[k] * dt**k for k in range(order + 1))
        b = sum(self.b[k] * dt**k for k in range(order + 1))
        c = sum(self.C[k] * dt**k for k in range(order + 1))
        return Generators(A=a, b=b, C=(c + c.T) / 2)

    def to_json_obj(self):
        return [
            {"k": k, "A": self.A[k].tolist(), "b": self.b[k].tolist(), "C": self.C[k].tolist()}
            for k in range(self.order + 1)
        ]


def _series_product(first, second, order):
    """Cauchy product of two matrix power series, truncated at `order`."""
    return [
        sum(first[i] @ second[k - i] for i in range(k + 1)) for k in range(order + 1)
    ]


def _log_series(t_series, order):
    """Coefficients of Log(T(dt)) given T(dt) = 1 + sum_k dt^k T_k."""
    n = t_series[0].shape[0]
    shifted = [np.zeros((n, n))] + [np.asarray(m) for m in t_series[1:]]
    out = [np.zeros((n, n)) for _ in range(order + 1)]
    power = [np.eye(n)] + [np.zeros((n, n))] * order
    for m in range(1, order + 1):
        power = _series_product(power, shifted, order)
        coeff = (-1) ** (m + 1) / m
        out = [out[k] + coeff * power[k] for k in range(order + 1)]
    return out


def _log_div_series(t_series, order):
    """Coefficients of Log(T)/(T - 1) = sum_m (-1)^m/(m+1) (T - 1)^m."""
    n = t_series[0].shape[0]
    shifted = [np.zeros((n, n))] + [np.asarray(m) for m in t_series[1:]]
    out = [np.eye(n)] + [np.zeros((n, n))] * order
    power = [np.eye(n)] + [np.zeros((n, n))] * order
    for m in range(1, order + 1):
        power = _series_product(power, shifted, order)
        coeff = (-1) ** m / (m + 1)
        out = [out[k] + coeff * power[k] for k in range(order + 1)]
    return out


def series_from_channel_series(t_series, d_series, r_series, order=None):
    """Generator series from a channel series (T_k, d_k, R_k).

    The channel series must start from the trivial channel (T_0 = 1,
    d_0 = 0, R_0 = 0) and must carry one more order than requested, since
    the k-th generator coefficient draws on the (k+1)-th channel one.
    Orders up to 3 are supported.
    """
    t_series = [np.asarray(m, dtype=float) for m in t_series]
    d_series = [np.asarray(v, dtype=float) for v in d_series]
    r_series = [np.asarray(m, dtype=float) for m in r_series]
    n = t_series[0].shape[0]
    if (
        np.abs(t_series[0] - np.eye(n)).max() > 1e-12
        or np.abs(d_series[0]).max() > 1e-12
        or np.abs(r_series[0]).max() > 1e-12
    ):
        raise MalformedSeriesError("channel series must start from the trivial channel")
    if order is None:
        order = len(t_series) - 2
    if order > 3:
        raise ValueError("generator series is supported up to order 3")
    if min(len(t_series), len(d_series), len(r_series)) < order + 2:
        raise MalformedSeriesError(
            f"order-{order} generators need channel coefficients through order {order + 1}"
        )
    kc = order + 1
    omega = symplectic_form(n // 2)

    log_t = _log_series(t_series, kc)
    ldiv = _log_div_series(t_series, kc)
    drift = [
        sum(ldiv[i] @ d_series[k - i] for i in range(k + 1)) for k in range(kc + 1)
    ]

    eye = np.eye(n)
    big = [
        sum(
            (tensor_product(t_series[i], t_series[k - i]) for i in range(k + 1)),
            start=np.zeros((n * n, n * n)),
        )
        for k in range(kc + 1)
    ]
    big[0] = np.eye(n * n)
    ldiv_big = _log_div_series(big, kc)
    r_vec = [m.reshape(-1) for m in r_series]
    noise = [
        sum(ldiv_big[i] @ r_vec[k - i] for i in range(k + 1)) for k in range(kc + 1)
    ]

    a_coeffs = [-omega @ log_t[k + 1] for k in range(order + 1)]
    b_coeffs = [-omega @ drift[k + 1] for k in range(order + 1)]
    c_coeffs = []
    for k in range(order + 1):
        c = noise[k + 1].reshape(n, n)
        c_coeffs.append((c + c.T) / 2)
    return GeneratorSeries(A=a_coeffs, b=b_coeffs, C=c_coeffs)


def generator_series_from_joint(setup, order):
    """Generator series of a bombardment setup through the mechanical route
    (exact channel Taylor coefficients fed into the logarithm series)."""
    if order > 3:
        raise ValueError("generator series is supported up to order 3")
    t_series, d_series, r_series = channel_taylor(setup, order + 1)
    return series_from_channel_series(t_series, d_series, r_series, order)


def closed_form_series(setup, order=2):
    """Closed-form generator series of a bombardment setup, orders 0..2.

    A_0 = F_S and b_0 = alpha_S + G X_A0 reproduce the free flow pushed by
    the mean ancilla displacement; A_1 = (1/2) G Omega_A G^T drives
    amplification or relaxation; C_1 conjugates the ancilla covariance into
    the system and is always positive semi-definite; the second-order terms
    account for the ancilla evolving freely during one step.
    """
    if not 0 <= order <= 2:
        raise ValueError("closed forms cover orders 0 through 2")
    f_s, f_a, g = setup.F_S, setup.F_A, setup.G
    alpha_s, alpha_a = setup.alpha_S, setup.alpha_A
    x_a, sigma_a = setup.X_A0, setup.sigma_A0
    omega_s = symplectic_form(setup.n_sys)
    omega_a = symplectic_form(setup.n_anc)
    q_a = omega_a @ f_a

    a_coeffs = [f_s.copy()]
    b_coeffs = [alpha_s + g @ x_a]
    c_coeffs = [np.zeros((2 * setup.n_sys,) * 2)]
    if order >= 1:
        a_coeffs.append(0.5 * g @ omega_a @ g.T)
        b_coeffs.append(0.5 * g @ q_a @ x_a + 0.5 * g @ omega_a @ alpha_a)
        c1 = omega_s @ g @ sigma_a @ g.T @ omega_s.T
        c_coeffs.append((c1 + c1.T) / 2)
    if order >= 2:
        a2 = (
            -g @ omega_a @ g.T @ omega_s @ f_s / 12
            - f_s @ omega_s @ g @ omega_a @ g.T / 12
            + g @ q_a @ omega_a @ g.T / 6
        )
        a_coeffs.append(a2)
        b2 = (
            -f_s @ omega_s @ g @ omega_a @ alpha_a / 12
            + g @ q_a @ omega_a @ alpha_a / 6
            - f_s @ omega_s @ g @ q_a @ x_a / 12
            + g @ q_a @ q_a @ x_a / 6
            - g @ omega_a @ g.T @ omega_s @ alpha_s / 12
            - g @ omega_a @ g.T @ omega_s @ g @ x_a / 12
        )
        b_coeffs.append(b2)
        c2 = 0.5 * omega_s @ g @ (q_a @ sigma_a + sigma_a @ q_a.T) @ g.T @ omega_s.T
        c_coeffs.append((c2 + c2.T) / 2)
    return GeneratorSeries(A=a_coeffs, b=b_coeffs, C=c_coeffs)


def truncated_cp_check(series, order, dt, tol=1e-9):
    """Differential CP test on the series truncated at `order` and evaluated
    at step duration dt."""
    return cp_differential_check(series.truncate(order, dt), tol=tol)


def can_purify(a, tol=PURIFY_TOL):
    """Whether dynamics with drift matrix A can increase any state's purity.

    Holds exactly when trace(Omega A) is negative; symmetric (unitary) A
    never purifies.
    """
    a = np.asarray(a)
    omega = symplectic_form(a.shape[0] // 2)
    return float(np.trace(omega @ a)) < -tol


def first_order_purify(g, omega_s=None, omega_a=None, tol=PURIFY_TOL):
    """Leading-order purification test for a coupling block G.

    Returns (flag, value) with value = (1/2) trace(Omega_S G Omega_A G^T);
    purification at leading order requires a negative value.  Rank-one
    couplings always give exactly zero.
    """
    g = np.asarray(g, dtype=float)
    if omega_s is None:
        omega_s = symplectic_form(g.shape[0] // 2)
    if omega_a is None:
        omega_a = symplectic_form(g.shape[1] // 2)
    value = 0.5 * float(np.trace(omega_s @ g @ omega_a @ g.T))
    return value < -tol, value


def rank_one_coupling(u, v):
    """Coupling block u v^T of a product interaction; rank at most one."""
    return np.outer(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
