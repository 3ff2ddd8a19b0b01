"""General Gaussian channels and the reduction of joint system-ancilla
Hamiltonian evolution to a system-only channel.

A channel is a triple (T, d, R) acting as mean -> T mean + d and
cov -> T cov T^T + R.  It is completely positive and trace preserving (CPTP)
exactly when R - i(T Omega T^T - Omega) is positive semi-definite.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidAncillaStateError,
    InvalidSetupError,
    InvalidStateError,
)
from .linalg import expm1_div, mat_exp, min_eig_hermitian
from .phasespace import (
    GaussianState,
    _check_symmetric,
    _frozen_array,
    symplectic_form,
    validate_state,
)

CPTP_TOL = 1e-9


@dataclass(frozen=True)
class GaussianChannel:
    """One Gaussian update step: mean -> T mean + d, cov -> T cov T^T + R."""

    T: np.ndarray
    d: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        _frozen_array(self, "T", self.T)
        _frozen_array(self, "d", self.d)
        _frozen_array(self, "R", self.R)
        if self.T.ndim != 2 or self.T.shape[0] != self.T.shape[1]:
            raise DimensionMismatchError("T must be square")
        n = self.T.shape[0]
        if n % 2 != 0:
            raise DimensionMismatchError("T must act on full modes (even dimension)")
        if self.d.shape != (n,) or self.R.shape != (n, n):
            raise DimensionMismatchError("d and R must match T")
        _check_symmetric(self.R, "noise matrix R")

    @property
    def n_modes(self):
        return self.T.shape[0] // 2

    def to_dict(self):
        return {"T": self.T.tolist(), "d": self.d.tolist(), "R": self.R.tolist()}

    @classmethod
    def from_dict(cls, obj):
        return cls(
            T=np.asarray(obj["T"]), d=np.asarray(obj["d"]), R=np.asarray(obj["R"])
        )


@dataclass(frozen=True)
class CpReport:
    """Result of a positivity test: flag plus the smallest eigenvalue found."""

    ok: bool
    margin: float


def identity_channel(n_modes):
    n = 2 * n_modes
    return GaussianChannel(T=np.eye(n), d=np.zeros(n), R=np.zeros((n, n)))


def apply(channel, state):
    """Apply a channel to a state."""
    if channel.T.shape[0] != state.mean.size:
        raise DimensionMismatchError("channel and state dimensions differ")
    mean = channel.T @ state.mean + channel.d
    cov = channel.T @ state.cov @ channel.T.T + channel.R
    return GaussianState(mean=mean, cov=(cov + cov.T) / 2)


def is_cptp(channel, tol=CPTP_TOL):
    """Complete-positivity test: R - i(T Omega T^T - Omega) >= 0.

    Returns the smallest eigenvalue of that Hermitian matrix as the margin;
    the channel is CPTP when the margin is >= -tol.
    """
    omega = symplectic_form(channel.n_modes)
    twist = channel.T @ omega @ channel.T.T - omega
    twist = (twist - twist.T) / 2
    herm = (channel.R + channel.R.T) / 2 - 1j * twist
    margin = min_eig_hermitian(herm, hermitian_tol=1e-8)
    return CpReport(ok=margin >= -tol, margin=margin)


def compose(second, first):
    """Channel applying `first` then `second` (fresh-ancilla semantics)."""
    if second.T.shape != first.T.shape:
        raise DimensionMismatchError("channel dimensions differ")
    t = second.T @ first.T
    d = second.T @ first.d + second.d
    r = second.T @ first.R @ second.T.T + second.R
    return GaussianChannel(T=t, d=d, R=(r + r.T) / 2)


def channel_power(channel, n):
    """n-fold composition of a channel with itself, by binary exponentiation."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    result = identity_channel(channel.n_modes)
    base = channel
    while n:
        if n & 1:
            result = compose(base, result)
        base = compose(base, base)
        n >>= 1
    return result


def trajectory(channel, state, steps):
    """States after 0..steps repeated applications of the channel."""
    out = [state]
    for _ in range(steps):
        out.append(apply(channel, out[-1]))
    return out


@dataclass(frozen=True)
class JointSetup:
    """Bombardment scenario: system and ancilla free Hamiltonians, their
    coupling block G, the initial ancilla state, and the step duration.

    The joint Hamiltonian matrix is [[F_S, G], [G^T, F_A]] with linear part
    (alpha_S, alpha_A); every step the system meets a fresh ancilla prepared
    in (X_A0, sigma_A0).
    """

    F_S: np.ndarray
    F_A: np.ndarray
    G: np.ndarray
    alpha_S: np.ndarray = None
    alpha_A: np.ndarray = None
    X_A0: np.ndarray = None
    sigma_A0: np.ndarray = None
    dt: float = 0.0

    def __post_init__(self):
        _frozen_array(self, "F_S", self.F_S)
        _frozen_array(self, "F_A", self.F_A)
        _frozen_array(self, "G", self.G)
        ds, da = self.F_S.shape[0], self.F_A.shape[0]
        if ds % 2 or da % 2:
            raise DimensionMismatchError("F_S and F_A must have even dimensions")
        _check_symmetric(self.F_S, "F_S")
        _check_symmetric(self.F_A, "F_A")
        if self.G.shape != (ds, da):
            raise DimensionMismatchError(f"G must be {ds}x{da}, got {self.G.shape}")
        _frozen_array(self, "alpha_S", np.zeros(ds) if self.alpha_S is None else self.alpha_S)
        _frozen_array(self, "alpha_A", np.zeros(da) if self.alpha_A is None else self.alpha_A)
        _frozen_array(self, "X_A0", np.zeros(da) if self.X_A0 is None else self.X_A0)
        sigma = np.eye(da) if self.sigma_A0 is None else self.sigma_A0
        _frozen_array(self, "sigma_A0", sigma)
        if self.alpha_S.shape != (ds,) or self.alpha_A.shape != (da,):
            raise DimensionMismatchError("linear parts must match F_S/F_A")
        if self.X_A0.shape != (da,) or self.sigma_A0.shape != (da, da):
            raise DimensionMismatchError("ancilla state must match F_A")
        if self.dt < 0:
            raise InvalidSetupError("dt must be nonnegative")
        try:
            anc = GaussianState(mean=self.X_A0, cov=self.sigma_A0)
            check = validate_state(anc)
        except InvalidStateError as exc:
            raise InvalidAncillaStateError(str(exc)) from exc
        if not check.ok:
            raise InvalidAncillaStateError(check.message)

    @property
    def n_sys(self):
        return self.F_S.shape[0] // 2

    @property
    def n_anc(self):
        return self.F_A.shape[0] // 2

    def joint_generator(self):
        """Omega_SA F_SA, the phase-space generator of the joint flow."""
        ds, da = self.F_S.shape[0], self.F_A.shape[0]
        f_sa = np.block([[self.F_S, self.G], [self.G.T, self.F_A]])
        omega_sa = np.zeros((ds + da, ds + da))
        omega_sa[:ds, :ds] = symplectic_form(self.n_sys)
        omega_sa[ds:, ds:] = symplectic_form(self.n_anc)
        return omega_sa @ f_sa, omega_sa

    def _affine_source(self, omega_sa):
        return omega_sa @ np.concatenate([self.alpha_S, self.alpha_A])


def reduce_from_joint(setup, dt=None):
    """Channel on the system alone from one joint evolution of duration dt.

    Evolves the joint phase space by exp(Omega_SA F_SA dt), splits the result
    into system/ancilla blocks M_SS, M_SA and the system part of the affine
    shift, and returns T = M_SS, d = M_SA X_A0 + d_S,
    R = M_SA sigma_A0 M_SA^T.  The output is CPTP whenever the ancilla state
    is valid.
    """
    if dt is None:
        dt = setup.dt
    ds = 2 * setup.n_sys
    gen, omega_sa = setup.joint_generator()
    flow = mat_exp(gen * dt)
    shift = expm1_div(gen, dt) @ setup._affine_source(omega_sa)
    m_ss = flow[:ds, :ds]
    m_sa = flow[:ds, ds:]
    d = m_sa @ setup.X_A0 + shift[:ds]
    r = m_sa @ setup.sigma_A0 @ m_sa.T
    return GaussianChannel(T=m_ss, d=d, R=(r + r.T) / 2)


def channel_taylor(setup, order):
    """Taylor coefficients in dt of the reduced channel about dt = 0.

    Returns three lists (T_k, d_k, R_k) for k = 0..order, computed from the
    exact power series of the joint exponential; no numerical
    differentiation is involved.  T_0 = 1, d_0 = 0, R_0 = 0 always.
    """
    if not 0 <= order <= 4:
        raise ValueError("order must be between 0 and 4")
    ds = 2 * setup.n_sys
    gen, omega_sa = setup.joint_generator()
    source = setup._affine_source(omega_sa)

    powers = [np.eye(gen.shape[0])]
    for _ in range(order):
        powers.append(powers[-1] @ gen)
    factorial = [1.0]
    for k in range(1, order + 1):
        factorial.append(factorial[-1] * k)

    t_list = [powers[k][:ds, :ds] / factorial[k] for k in range(order + 1)]
    m_sa = [powers[k][:ds, ds:] / factorial[k] for k in range(order + 1)]
    d_list = [np.zeros(ds)]
    for k in range(1, order + 1):
        d_list.append(powers[k - 1][:ds, :] @ source / factorial[k] + m_sa[k] @ setup.X_A0)
    r_list = [np.zeros((ds, ds))]
    for k in range(1, order + 1):
        acc = np.zeros((ds, ds))
        for i in range(1, k):
            acc += m_sa[i] @ setup.sigma_A0 @ m_sa[k - i].T
        r_list.append((acc + acc.T) / 2)
    return t_list, d_list, r_list
