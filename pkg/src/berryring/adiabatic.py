"""Local eigenmodes, geometric phase via solid angle, and adiabatic monodromy.

For a closed birefringence loop kappa(s) that never touches the origin, the
adiabatic limit predicts a diagonal round-trip matrix in the local eigenbasis
with total phases

    delta_up   = -Omega/2 + integral (k0 + |kappa|) ds
    delta_down = +Omega/2 + integral (k0 - |kappa|) ds

where Omega is the signed solid angle subtended by kappa(s) at the origin.
Omega is computed geometrically (spherical-polygon area), which is pole-safe;
planar loops fall back to a winding-number count, for which the solid angle
is 2*pi*n.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import AnalysisError, DegeneracyError, InvalidArgumentError
from .paths import RingPath
from .spinor import eigenbasis

_PLANAR_RTOL = 1e-9


@dataclass(frozen=True)
class EigenFrame:
    """Instantaneous eigenvectors and eigenvalues of K = k0*I + kappa.sigma."""

    up: np.ndarray
    down: np.ndarray
    k_plus: float
    k_minus: float


@dataclass(frozen=True)
class AdiabaticPhases:
    """Solid angle and the geometric/dynamic/total phase split per eigenmode."""

    omega: float
    gamma_up: float
    gamma_down: float
    dyn_up: float
    dyn_down: float
    delta_up: float
    delta_down: float


def eigenframe(sample, tol=1e-12):
    """EigenFrame of a BirefringenceSample in the shared gauge convention."""
    v = eigenbasis(sample.kappa, tol=tol)
    mag = sample.magnitude
    return EigenFrame(
        up=v[:, 0].copy(),
        down=v[:, 1].copy(),
        k_plus=sample.k0 + mag,
        k_minus=sample.k0 - mag,
    )


def _unit_ring_samples(ring, n_samples, degeneracy_tol):
    lo, hi = ring.domain
    s = np.linspace(lo, hi, n_samples, endpoint=False)
    _, kap = ring.sample(s)
    mag = np.linalg.norm(kap, axis=1)
    bad = mag <= degeneracy_tol
    if np.any(bad):
        s_bad = s[bad][0]
        raise DegeneracyError(
            f"|kappa| <= {degeneracy_tol:.1e} at s = {s_bad:.6g}; the path passes "
            "through the degeneracy and the adiabatic picture breaks down"
        )
    return kap / mag[:, None]


def _planar_normal(v):
    """Unit normal of the best-fit plane through the origin, or None."""
    # Rows of vh are right singular vectors; the last one spans the residual.
    _, sv, vh = np.linalg.svd(v, full_matrices=False)
    if sv[2] > _PLANAR_RTOL * sv[0]:
        return None
    normal = vh[2]
    i = int(np.argmax(np.abs(normal)))
    return normal if normal[i] > 0 else -normal


def _winding_solid_angle(v, normal):
    """2*pi times the signed winding number of a planar loop around the origin.

    Orientation: angles are counted right-handed about `normal`, whose sign
    is fixed so its largest-magnitude component is positive.
    """
    e1 = v[0] - np.dot(v[0], normal) * normal
    n1 = np.linalg.norm(e1)
    if n1 < 1e-12:
        e1 = np.array([1.0, 0.0, 0.0]) - normal[0] * normal
        n1 = np.linalg.norm(e1)
    e1 /= n1
    e2 = np.cross(normal, e1)
    ang = np.arctan2(v @ e2, v @ e1)
    ang = np.append(ang, ang[0])
    steps = np.diff(ang)
    steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
    if np.max(np.abs(steps)) > 3.0:
        raise DegeneracyError(
            "planar loop passes through or very near the origin between samples; "
            "winding (and the adiabatic picture) is not defined there"
        )
    total = float(np.sum(steps))
    n_wind = total / (2.0 * np.pi)
    if abs(n_wind - round(n_wind)) > 0.05:
        raise AnalysisError(
            f"planar winding count did not close on an integer (got {n_wind:.4f}); "
            "increase n_samples"
        )
    return 2.0 * np.pi * round(n_wind)


def _fan_solid_angle(v):
    """Signed spherical area by fan triangulation from an adaptive pivot."""
    mean = np.sum(v, axis=0)
    candidates = []
    norm = np.linalg.norm(mean)
    if norm > 1e-9:
        candidates.append(mean / norm)
    for axis in np.vstack([np.eye(3), -np.eye(3)]):
        candidates.append(axis)
    vk = v
    vk1 = np.roll(v, -1, axis=0)
    seg_dots = np.einsum("ij,ij->i", vk, vk1)
    if np.min(seg_dots) < -0.95:
        raise AnalysisError(
            "consecutive loop samples are nearly antipodal on the sphere; "
            "increase n_samples (the loop may pass close to the origin)"
        )
    cross = np.cross(vk, vk1)
    dots = 1.0 + seg_dots
    for c in candidates:
        num = cross @ c
        den = dots + vk @ c + vk1 @ c
        # A pivot is unusable if some triangle is close to degenerate
        # antipodal (both atan2 arguments vanish) or spans a near half-lune.
        scale = np.hypot(num, den)
        if np.min(scale) < 1e-12:
            continue
        area = 2.0 * np.arctan2(num, den)
        if np.max(np.abs(area)) > 1.9 * np.pi:
            continue
        return float(np.sum(area))
    raise AnalysisError(
        "no pivot yields a non-degenerate fan triangulation; "
        "the projected loop may cover the whole sphere"
    )


def solid_angle(ring, n_samples=20001, degeneracy_tol=1e-9):
    """Signed solid angle subtended at the origin by the closed loop kappa(s).

    Planar loops (all kappa in one plane through the origin) are resolved by
    winding number, returning exactly 2*pi*n; anything else is accumulated as
    the spherical-polygon area of the projected unit vectors.
    """
    if n_samples < 16:
        raise InvalidArgumentError("n_samples must be at least 16")
    v = _unit_ring_samples(ring, n_samples, degeneracy_tol)
    normal = _planar_normal(v)
    if normal is not None:
        return _winding_solid_angle(v, normal)
    return _fan_solid_angle(v)


def _dynamic_integrals(ring, k0_profile, samples_per_unit):
    """(integral k0 ds, integral |kappa| ds) by per-segment Simpson rule."""
    edges = ring.offsets if isinstance(ring, RingPath) else np.array(ring.domain)
    total_k0 = 0.0
    total_mag = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(64, 2 * int(np.ceil(samples_per_unit * (b - a) / 2)))
        s = np.linspace(a, b, n + 1)
        k0s, kap = ring.sample(s)
        if k0_profile is not None:
            k0s = np.asarray(k0_profile(s), dtype=float) + 0.0 * k0s
        mag = np.linalg.norm(kap, axis=1)
        total_k0 += float(simpson(k0s, x=s))
        total_mag += float(simpson(mag, x=s))
    return total_k0, total_mag


def adiabatic_monodromy(
    ring, k0_profile=None, n_samples=20001, samples_per_unit=2000, degeneracy_tol=1e-9
):
    """Adiabatic-limit round-trip matrix and its phase decomposition.

    Returns (M, AdiabaticPhases) with M = diag(e^{i delta_up}, e^{i delta_down})
    in the local eigenbasis.  k0_profile overrides the path's own k0 when
    given (callable of arc length, vectorized).
    """
    omega = solid_angle(ring, n_samples=n_samples, degeneracy_tol=degeneracy_tol)
    int_k0, int_mag = _dynamic_integrals(ring, k0_profile, samples_per_unit)
    gamma_up = -0.5 * omega
    gamma_down = +0.5 * omega
    dyn_up = int_k0 + int_mag
    dyn_down = int_k0 - int_mag
    delta_up = gamma_up + dyn_up
    delta_down = gamma_down + dyn_down
    m = np.diag([np.exp(1j * delta_up), np.exp(1j * delta_down)]).astype(complex)
    phases = AdiabaticPhases(
        omega=omega,
        gamma_up=gamma_up,
        gamma_down=gamma_down,
        dyn_up=dyn_up,
        dyn_down=dyn_down,
        delta_up=delta_up,
        delta_down=delta_down,
    )
    return m, phases
