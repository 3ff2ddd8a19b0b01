"""The time-independent master equation that interpolates a discrete channel.

Given a channel (T, d, R) applied every dt, there is a unique set of
time-independent generators (A, b, C) whose continuous flow

    dX/dt     = Omega (A X + b)
    dcov/dt   = (Omega A) cov + cov (Omega A)^T + C

reproduces the discrete dynamics exactly at every stroboscopic time n*dt.
The generators are built from the principal matrix logarithm of T (and of
T tensor T for the noise part), so they stay finite as dt -> 0.
"""

from dataclasses import dataclass

import numpy as np

from .channels import CpReport, GaussianChannel
from .errors import DimensionMismatchError
from .linalg import (
    expm1_div,
    logm_div,
    mat_exp,
    mat_log_principal,
    min_eig_hermitian,
    tensor_product,
    unvec,
    vec,
)
from .phasespace import _check_symmetric, _frozen_array, symplectic_form

CP_TOL = 1e-9


@dataclass(frozen=True)
class Generators:
    """Master-equation generators (A, b, C); C is symmetric noise."""

    A: np.ndarray
    b: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        _frozen_array(self, "A", self.A)
        _frozen_array(self, "b", self.b)
        _frozen_array(self, "C", self.C)
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise DimensionMismatchError("A must be square")
        n = self.A.shape[0]
        if n % 2 != 0:
            raise DimensionMismatchError("A must act on full modes (even dimension)")
        if self.b.shape != (n,) or self.C.shape != (n, n):
            raise DimensionMismatchError("b and C must match A")
        _check_symmetric(self.C, "noise generator C")

    @property
    def n_modes(self):
        return self.A.shape[0] // 2

    def to_dict(self):
        return {"A": self.A.tolist(), "b": self.b.tolist(), "C": self.C.tolist()}

    @classmethod
    def from_dict(cls, obj):
        return cls(
            A=np.asarray(obj["A"]), b=np.asarray(obj["b"]), C=np.asarray(obj["C"])
        )


def generators_from_channel(channel, dt):
    """Interpolation generators of a discrete channel applied every dt.

    Omega A = Log(T)/dt, Omega b = [Log(T)/(T - 1)] d / dt and
    C = unvec([Log(TxT)/(TxT - 1)] vec(R)) / dt, all on the principal branch.

    Raises BranchCutError when T (or T tensor T) has an eigenvalue on the
    closed negative real axis, which signals that dt is too large, and
    SingularMatrixError for singular T.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    t = channel.T
    omega = symplectic_form(channel.n_modes)
    omega_a = mat_log_principal(t) / dt
    omega_b = logm_div(t) @ channel.d / dt
    big = tensor_product(t, t)
    c = unvec(logm_div(big) @ vec(channel.R)) / dt
    # Omega^{-1} = -Omega
    a = -omega @ omega_a
    b = -omega @ omega_b
    return Generators(A=a, b=b, C=(c + c.T) / 2)


def covariance_flow_generator(gen):
    """Generator of the vectorized covariance flow, the Kronecker sum
    (Omega A) x 1 + 1 x (Omega A)."""
    omega = symplectic_form(gen.n_modes)
    oa = omega @ gen.A
    eye = np.eye(oa.shape[0])
    return tensor_product(oa, eye) + tensor_product(eye, oa)


def propagate(gen, t):
    """Channel produced by running the master equation for time t >= 0.

    T = exp(Omega A t), d = [(exp(Omega A t) - 1)/(Omega A)] Omega b, and the
    noise block R solves the Lyapunov-type flow, evaluated through the
    vectorized Kronecker-sum generator.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    omega = symplectic_form(gen.n_modes)
    oa = omega @ gen.A
    t_mat = mat_exp(oa * t)
    d = expm1_div(oa, t) @ (omega @ gen.b)
    k = covariance_flow_generator(gen)
    r = unvec(expm1_div(k, t) @ vec(gen.C))
    return GaussianChannel(T=t_mat, d=d, R=(r + r.T) / 2)


def cp_differential_check(gen, tol=CP_TOL):
    """Differential complete-positivity test: C - i Omega (A - A^T) Omega >= 0.

    The margin is the smallest eigenvalue of that Hermitian matrix; passing
    implies C itself is positive semi-definite.
    """
    omega = symplectic_form(gen.n_modes)
    anti = omega @ (gen.A - gen.A.T) @ omega
    herm = (gen.C + gen.C.T) / 2 - 1j * (anti - anti.T) / 2
    margin = min_eig_hermitian(herm, hermitian_tol=1e-8)
    return CpReport(ok=margin >= -tol, margin=margin)


def master_rhs(gen, state):
    """Right-hand side of the master equation at a state.

    Returns (dmean/dt, dcov/dt) = (Omega(A X + b),
    (Omega A) cov + cov (Omega A)^T + C).
    """
    if gen.A.shape[0] != state.mean.size:
        raise DimensionMismatchError("generators and state dimensions differ")
    omega = symplectic_form(gen.n_modes)
    oa = omega @ gen.A
    dmean = omega @ (gen.A @ state.mean + gen.b)
    dcov = oa @ state.cov + state.cov @ oa.T + gen.C
    return dmean, dcov


def b_from_affine_embedding(channel, dt):
    """Cross-check route for the drift generator b.

    Embeds the affine update into the linear map [[1, 0], [d, T]] on an
    augmented vector, takes one principal logarithm, and reads b off the
    lower-left block.  Kept separate from the production path so the two can
    be tested against each other.
    """
    n = channel.T.shape[0]
    phi = np.zeros((n + 1, n + 1))
    phi[0, 0] = 1.0
    phi[1:, 0] = channel.d
    phi[1:, 1:] = channel.T
    log_phi = mat_log_principal(phi)
    omega = symplectic_form(channel.n_modes)
    return -omega @ log_phi[1:, 0] / dt
