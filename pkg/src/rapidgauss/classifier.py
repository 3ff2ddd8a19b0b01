"""Classify which kinds of dynamics a set of generators drives.

Every 2x2 block of a generator matrix decomposes exactly over the orthogonal
basis {1, omega, X, Z}.  Eleven dynamics types are distinguished: the
symmetric part of A gives unitary effects (single/multi-mode rotations and
squeezings), the antisymmetric part non-unitary ones
(amplification/relaxation and the multi-mode counter effects), b drives
displacement, and C injects thermal, squeezed, or multi-mode noise.

The availability table records at which series orders a bombardment can
produce each type: unitary A effects at even orders only (at order zero only
through the free Hamiltonian), non-unitary A effects at odd orders,
displacement everywhere, and noise at every order past zero.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .interpolation import Generators

_BASIS_NAMES = ("id", "omega", "x", "z")
_BASIS = (
    np.eye(2),
    np.array([[0.0, 1.0], [-1.0, 0.0]]),
    np.array([[0.0, 1.0], [1.0, 0.0]]),
    np.array([[1.0, 0.0], [0.0, -1.0]]),
)

DYNAMICS_TYPES = (
    "single_mode_rotation",
    "single_mode_squeezing",
    "displacement",
    "single_mode_squeezed_noise",
    "amplification_relaxation",
    "thermal_noise",
    "multi_mode_rotation",
    "multi_mode_squeezing",
    "multi_mode_counter_rotation",
    "multi_mode_noise",
    "multi_mode_counter_squeezing",
)

# availability per type: (0th via free Hamiltonian, 0th induced, odd >= 1, even >= 2)
TABLE_AVAILABILITY = {
    "single_mode_rotation": (True, False, False, True),
    "single_mode_squeezing": (True, False, False, True),
    "displacement": (True, True, True, True),
    "single_mode_squeezed_noise": (False, False, True, True),
    "amplification_relaxation": (False, False, True, False),
    "thermal_noise": (False, False, True, True),
    "multi_mode_rotation": (True, False, False, True),
    "multi_mode_squeezing": (True, False, False, True),
    "multi_mode_counter_rotation": (False, False, True, False),
    "multi_mode_noise": (False, False, True, True),
    "multi_mode_counter_squeezing": (False, False, True, False),
}


def allowed_types(order):
    """Types a bombardment may produce at a series order (0th: free or induced)."""
    out = set()
    for name, (free0, induced0, odd, even) in TABLE_AVAILABILITY.items():
        if order == 0:
            if free0 or induced0:
                out.add(name)
        elif order % 2 == 1:
            if odd:
                out.add(name)
        elif even:
            out.add(name)
    return out


@dataclass(frozen=True)
class BlockDecomposition:
    """Coefficients of every 2x2 block over {1, omega, X, Z}.

    coefficients[i, j] holds the four coefficients of block (i, j).
    """

    coefficients: np.ndarray
    basis_names: tuple = _BASIS_NAMES

    def block(self, i, j):
        return {name: float(c) for name, c in zip(self.basis_names, self.coefficients[i, j])}

    def reconstruct(self):
        nb = self.coefficients.shape[0]
        out = np.zeros((2 * nb, 2 * nb))
        for i in range(nb):
            for j in range(nb):
                for c, basis in zip(self.coefficients[i, j], _BASIS):
                    out[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] += c * basis
        return out


def block_decompose(m):
    """Exact expansion of each 2x2 block over the orthogonal basis.

    The basis is orthogonal under (1/2) Tr(P^T Q), so coefficients are plain
    trace projections and the round trip is exact.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2 != 0:
        raise DimensionMismatchError("expected a square matrix of even dimension")
    nb = m.shape[0] // 2
    coeffs = np.zeros((nb, nb, 4))
    for i in range(nb):
        for j in range(nb):
            block = m[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]
            for k, basis in enumerate(_BASIS):
                coeffs[i, j, k] = 0.5 * float(np.trace(basis.T @ block))
    return BlockDecomposition(coefficients=coeffs)


@dataclass(frozen=True)
class DynamicsReport:
    """Presence flags for the eleven dynamics types."""

    flags: dict

    def __post_init__(self):
        missing = set(DYNAMICS_TYPES) - set(self.flags)
        if missing:
            raise ValueError(f"missing dynamics types: {sorted(missing)}")
        object.__setattr__(self, "flags", dict(self.flags))

    def __getitem__(self, name):
        return self.flags[name]

    @property
    def present(self):
        return {name for name in DYNAMICS_TYPES if self.flags[name]}

    def to_dict(self):
        return {name: bool(self.flags[name]) for name in DYNAMICS_TYPES}


def classify(gen, eps=1e-10):
    """Flag the dynamics types a set of generators drives.

    Coefficients are compared against eps times the overall generator scale,
    so exact structural zeros (for example the symmetric part of an odd-order
    coefficient) never raise a flag.
    """
    a, b, c = np.asarray(gen.A), np.asarray(gen.b), np.asarray(gen.C)
    scale = max(np.abs(a).max(), np.abs(b).max(), np.abs(c).max(), 0.0)
    flags = {name: False for name in DYNAMICS_TYPES}
    if scale == 0.0:
        return DynamicsReport(flags=flags)
    thr = eps * scale

    sym = block_decompose((a + a.T) / 2).coefficients
    anti = block_decompose((a - a.T) / 2).coefficients
    noise = block_decompose((c + c.T) / 2).coefficients
    nb = sym.shape[0]
    for i in range(nb):
        c_id, c_om, c_x, c_z = sym[i, i]
        if abs(c_id) > thr:
            flags["single_mode_rotation"] = True
        if abs(c_x) > thr or abs(c_z) > thr:
            flags["single_mode_squeezing"] = True
        if abs(anti[i, i, 1]) > thr:
            flags["amplification_relaxation"] = True
        n_id, n_om, n_x, n_z = noise[i, i]
        if abs(n_id) > thr:
            flags["thermal_noise"] = True
        if abs(n_x) > thr or abs(n_z) > thr:
            flags["single_mode_squeezed_noise"] = True
    for i in range(nb):
        for j in range(nb):
            if i == j:
                continue
            s_id, s_om, s_x, s_z = sym[i, j]
            if abs(s_id) > thr or abs(s_om) > thr:
                flags["multi_mode_rotation"] = True
            if abs(s_x) > thr or abs(s_z) > thr:
                flags["multi_mode_squeezing"] = True
            a_id, a_om, a_x, a_z = anti[i, j]
            if abs(a_id) > thr or abs(a_om) > thr:
                flags["multi_mode_counter_rotation"] = True
            if abs(a_x) > thr or abs(a_z) > thr:
                flags["multi_mode_counter_squeezing"] = True
            if np.abs(noise[i, j]).max() > thr:
                flags["multi_mode_noise"] = True
    if np.abs(b).max() > thr:
        flags["displacement"] = True
    return DynamicsReport(flags=flags)


def table_availability(series, order, eps=1e-10):
    """Classify the order-k coefficients of a generator series.

    For a bombardment-derived series the flags land inside
    :func:`allowed_types` for that order.
    """
    if order > series.order:
        raise ValueError(f"series only carries orders up to {series.order}")
    c = series.C[order]
    gen = Generators(A=series.A[order], b=series.b[order], C=(c + c.T) / 2)
    return classify(gen, eps=eps)
