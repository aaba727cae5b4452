"""Two-component spinor and 2x2 transfer-matrix algebra.

The state of polarization is a normalized complex 2-vector.  The local
birefringence generator is decomposed as K = k0*I + kappa.sigma, where
sigma are the Pauli matrices, and the elementary propagator over a step x
has the closed form

    exp(i x K) = exp(i k0 x) [I cos(a x) + i (kappa_hat . sigma) sin(a x)]

with a = |kappa|.  Everything here is a fixed-size 2x2 value computation;
inputs are never mutated.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    ContractViolationError,
    DegeneracyError,
    InvalidArgumentError,
    SingularMatrixError,
)

SIGMA_1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class BirefringenceSample:
    """Generator decomposition (k0, kappa) at one point of a path."""

    k0: float
    kappa: np.ndarray

    def __post_init__(self):
        kap = np.asarray(self.kappa, dtype=float)
        if kap.shape != (3,):
            raise InvalidArgumentError("kappa must be a 3-vector")
        if not (np.isfinite(self.k0) and np.all(np.isfinite(kap))):
            raise InvalidArgumentError("birefringence components must be finite")
        object.__setattr__(self, "kappa", kap)

    @property
    def magnitude(self):
        return float(np.linalg.norm(self.kappa))

    def matrix(self):
        """Full generator k0*I + kappa.sigma as a 2x2 complex array."""
        k1, k2, k3 = self.kappa
        return self.k0 * IDENTITY_2 + k1 * SIGMA_1 + k2 * SIGMA_2 + k3 * SIGMA_3


def pauli_exp(x, sample):
    """Closed-form exp(i x (k0*I + kappa.sigma)).

    The |kappa| = 0 case is exact: the sigma term carries sin(0) = 0, so the
    result is the scalar phase exp(i k0 x) times the identity.
    """
    if not np.isfinite(x):
        raise InvalidArgumentError("step length must be finite")
    a = sample.magnitude
    phase = np.exp(1j * sample.k0 * x)
    if a == 0.0:
        return phase * IDENTITY_2.copy()
    n1, n2, n3 = sample.kappa / a
    c = np.cos(a * x)
    s = np.sin(a * x)
    return phase * np.array(
        [
            [c + 1j * s * n3, 1j * s * (n1 - 1j * n2)],
            [1j * s * (n1 + 1j * n2), c - 1j * s * n3],
        ],
        dtype=complex,
    )


def normalize(spinor):
    """Return spinor scaled to unit norm."""
    v = np.asarray(spinor, dtype=complex)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise InvalidArgumentError("cannot normalize the zero spinor")
    return v / n


def bloch_of(spinor):
    """Bloch vector P = <e|sigma|e> of a normalized spinor."""
    v = np.asarray(spinor, dtype=complex)
    n2 = float(np.real(np.vdot(v, v)))
    if abs(n2 - 1.0) > 1e-6:
        raise ContractViolationError(f"spinor norm deviates from 1 by {abs(n2 - 1.0):.3e}")
    up, dn = v
    p1 = 2.0 * np.real(np.conj(up) * dn)
    p2 = 2.0 * np.imag(np.conj(up) * dn)
    p3 = abs(up) ** 2 - abs(dn) ** 2
    return np.array([p1, p2, p3])


def adjoint(m):
    return np.conj(np.asarray(m, dtype=complex)).T


def determinant(m):
    m = np.asarray(m, dtype=complex)
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def inverse(m):
    """Inverse of a 2x2 matrix via the adjugate formula."""
    m = np.asarray(m, dtype=complex)
    det = determinant(m)
    if abs(det) <= 1e-14:
        raise SingularMatrixError(f"matrix is singular (|det| = {abs(det):.3e})")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=complex) / det


def is_unitary(m, tol=1e-10):
    m = np.asarray(m, dtype=complex)
    return bool(np.max(np.abs(adjoint(m) @ m - IDENTITY_2)) < tol)


def eigenbasis(kappa, tol=1e-12):
    """Columns (up, down) of the local eigenbasis of kappa.sigma, as a 2x2 matrix.

    Gauge: phi = atan2(kappa2, kappa1) in (-pi, pi], theta = acos(kappa3/|kappa|)
    in [0, pi], and

        up   = ( cos(theta/2) e^{-i phi/2},  sin(theta/2) e^{+i phi/2} )
        down = (-sin(theta/2) e^{-i phi/2},  cos(theta/2) e^{+i phi/2} )

    so that (kappa.sigma) up = +|kappa| up and (kappa.sigma) down = -|kappa| down.
    """
    kappa = np.asarray(kappa, dtype=float)
    mag = float(np.linalg.norm(kappa))
    if mag <= tol:
        raise DegeneracyError(
            f"|kappa| = {mag:.3e} <= {tol:.1e}; eigenbasis undefined at a degeneracy"
        )
    phi = np.arctan2(kappa[1], kappa[0])
    theta = np.arccos(np.clip(kappa[2] / mag, -1.0, 1.0))
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    em = np.exp(-0.5j * phi)
    ep = np.exp(+0.5j * phi)
    return np.array([[c * em, -s * em], [s * ep, c * ep]], dtype=complex)
