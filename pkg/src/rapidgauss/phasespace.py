"""Gaussian states on phase space and their unitary (symplectic-affine) flow.

A state of N modes is a mean vector of length 2N and a real symmetric 2N x 2N
covariance matrix, in the quadrature ordering (q1, p1, ..., qN, pN) with
dimensionless units in which [q, p] = i.  Valid states satisfy the
uncertainty bound: cov + i*Omega is positive semi-definite.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidSetupError, InvalidStateError
from .linalg import expm1_div, mat_exp, min_eig_hermitian

# min eigenvalue of (cov + i Omega) may dip this far below zero, relative to
# max(1, |cov|), before a state is called invalid; absorbs roundoff
# accumulated over long trajectories
STATE_TOL = 1e-9

_omega_block = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n_modes):
    """Block-diagonal symplectic form for n_modes modes."""
    if n_modes < 1:
        raise InvalidSetupError("n_modes must be at least 1")
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = _omega_block
    return out


def _frozen_array(obj, field, value):
    a = np.array(value, dtype=float)
    a.setflags(write=False)
    object.__setattr__(obj, field, a)


def _check_symmetric(m, what, tol=1e-12, exc=InvalidSetupError):
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.T).max() > tol * scale:
        raise exc(f"{what} must be symmetric")


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of a Gaussian state: mean vector and covariance."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        _frozen_array(self, "mean", self.mean)
        _frozen_array(self, "cov", self.cov)
        if self.mean.ndim != 1:
            raise DimensionMismatchError("mean must be a vector")
        d = self.mean.size
        if d == 0 or d % 2 != 0:
            raise DimensionMismatchError("mean length must be a positive even number")
        if self.cov.shape != (d, d):
            raise DimensionMismatchError(
                f"cov shape {self.cov.shape} does not match mean length {d}"
            )
        if not (np.all(np.isfinite(self.mean)) and np.all(np.isfinite(self.cov))):
            raise ValueError("state has non-finite entries")
        _check_symmetric(self.cov, "covariance", exc=InvalidStateError)

    @property
    def n_modes(self):
        return self.mean.size // 2

    def to_dict(self):
        return {"mean": self.mean.tolist(), "cov": self.cov.tolist()}

    @classmethod
    def from_dict(cls, obj):
        return cls(mean=np.asarray(obj["mean"]), cov=np.asarray(obj["cov"]))


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """Quadratic generator: symmetric matrix F plus linear vector alpha."""

    F: np.ndarray
    alpha: np.ndarray = None

    def __post_init__(self):
        _frozen_array(self, "F", self.F)
        if self.F.ndim != 2 or self.F.shape[0] != self.F.shape[1]:
            raise DimensionMismatchError("F must be square")
        if self.F.shape[0] % 2 != 0:
            raise DimensionMismatchError("F must act on full modes (even dimension)")
        _check_symmetric(self.F, "F")
        alpha = np.zeros(self.F.shape[0]) if self.alpha is None else self.alpha
        _frozen_array(self, "alpha", alpha)
        if self.alpha.shape != (self.F.shape[0],):
            raise DimensionMismatchError("alpha length must match F")

    @property
    def n_modes(self):
        return self.F.shape[0] // 2


@dataclass(frozen=True)
class AffineSymplectic:
    """Phase-space map X -> S X + d with S preserving the symplectic form."""

    S: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        _frozen_array(self, "S", self.S)
        _frozen_array(self, "d", self.d)
        if self.S.ndim != 2 or self.S.shape[0] != self.S.shape[1]:
            raise DimensionMismatchError("S must be square")
        n = self.S.shape[0]
        if n % 2 != 0:
            raise DimensionMismatchError("S must act on full modes (even dimension)")
        if self.d.shape != (n,):
            raise DimensionMismatchError("d length must match S")
        omega = symplectic_form(n // 2)
        resid = np.abs(self.S @ omega @ self.S.T - omega).max()
        scale = max(1.0, float(np.abs(self.S).max()) ** 2)
        if resid > 1e-9 * scale:
            raise InvalidSetupError(
                f"S does not preserve the symplectic form (residual {resid:.2e})"
            )

    @property
    def n_modes(self):
        return self.S.shape[0] // 2


@dataclass(frozen=True)
class StateValidation:
    """Outcome of the uncertainty-bound check."""

    ok: bool
    min_eig: float
    message: str = ""


def validate_state(state, tol=STATE_TOL):
    """Check the uncertainty bound: min eig of (cov + i Omega) >= -tol*scale."""
    omega = symplectic_form(state.n_modes)
    m = state.cov + 1j * omega
    low = min_eig_hermitian(m, hermitian_tol=1e-8)
    scale = max(1.0, float(np.abs(state.cov).max()))
    if low >= -tol * scale:
        return StateValidation(ok=True, min_eig=low)
    return StateValidation(
        ok=False,
        min_eig=low,
        message=f"uncertainty bound violated: min eig {low:.3e} < {-tol * scale:.3e}",
    )


def purity(state):
    """Purity of a Gaussian state, 1/det(cov); 1 for pure states."""
    check = validate_state(state)
    if not check.ok:
        raise InvalidStateError(check.message)
    return 1.0 / float(np.linalg.det(state.cov))


def thermal_state(nu, n_modes=1):
    """Thermal state with covariance nu * identity and zero mean; nu >= 1."""
    if nu < 1.0:
        raise InvalidSetupError(f"thermal parameter must be >= 1, got {nu}")
    return GaussianState(mean=np.zeros(2 * n_modes), cov=nu * np.eye(2 * n_modes))


def nu_from_beta(beta, energy):
    """Thermal covariance scale nu = (e^(beta E) + 1)/(e^(beta E) - 1)."""
    x = beta * energy
    if not x > 0:
        raise InvalidSetupError(f"beta*energy must be positive, got {x}")
    return 1.0 / np.tanh(x / 2.0)


def beta_from_nu(nu, energy):
    """Inverse of :func:`nu_from_beta`; nu = 1 maps to infinite beta."""
    if energy <= 0:
        raise InvalidSetupError("energy must be positive")
    if nu < 1.0:
        raise InvalidSetupError(f"nu must be >= 1, got {nu}")
    if nu == 1.0:
        return np.inf
    return 2.0 * np.arctanh(1.0 / nu) / energy


def hamiltonian_flow(hamiltonian, t):
    """Symplectic-affine map generated by a quadratic Hamiltonian over time t.

    S = exp(Omega F t) and d = [(exp(Omega F t) - 1)/(Omega F)] Omega alpha,
    the latter evaluated through the divided-difference kernel so that
    singular Omega F (free or partial Hamiltonians) needs no special casing.
    """
    omega = symplectic_form(hamiltonian.n_modes)
    gen = omega @ hamiltonian.F
    s = mat_exp(gen * t)
    d = expm1_div(gen, t) @ (omega @ hamiltonian.alpha)
    return AffineSymplectic(S=s, d=d)


def apply_affine(state, transform):
    """Apply a symplectic-affine map to a state."""
    if transform.S.shape[0] != state.mean.size:
        raise DimensionMismatchError("transform and state dimensions differ")
    mean = transform.S @ state.mean + transform.d
    cov = transform.S @ state.cov @ transform.S.T
    return GaussianState(mean=mean, cov=(cov + cov.T) / 2)


def compose_affine(second, first):
    """Composite map applying `first` then `second`."""
    if second.S.shape != first.S.shape:
        raise DimensionMismatchError("transform dimensions differ")
    return AffineSymplectic(S=second.S @ first.S, d=second.S @ first.d + second.d)
