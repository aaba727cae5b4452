"""Serret-Frenet frames of 3D fiber curves and the Rytov birefringence.

A space curve r(s) in arc-length parametrization carries the orthonormal
frame (s_hat, nu_hat, b_hat) obeying

    d s_hat/ds  = kappa nu_hat
    d nu_hat/ds = -kappa s_hat + tau b_hat
    d b_hat/ds  = -tau nu_hat.

The torsion tau acts on the guided polarization as a geometric birefringence
K_g = tau * sigma_2 in the (nu_hat, b_hat) components (Rytov's law), so a
curve's polarization effect reduces to the path kappa(s) = (0, tau(s), 0).

Input curves in any regular parametrization are reparametrized to arc
length by cumulative chord length and monotone cubic (PCHIP) resampling.
"""

import io
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InvalidArgumentError, UndefinedNormalError
from .paths import TabulatedPath
from .spinor import BirefringenceSample


@dataclass(frozen=True)
class SpaceCurve:
    """Arc-length sampled curve: points[i] = r(s[i]) on a uniform s grid."""

    s: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        pts = np.asarray(self.points, dtype=float)
        if s.ndim != 1 or s.size < 7:
            raise InvalidArgumentError("a curve needs at least 7 samples")
        if pts.shape != (s.size, 3):
            raise InvalidArgumentError("points must have shape (n, 3)")
        if np.any(np.diff(s) <= 0):
            raise InvalidArgumentError("arc-length samples must increase strictly")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "points", pts)

    @property
    def length(self):
        return float(self.s[-1] - self.s[0])

    @staticmethod
    def from_samples(points, n_out=None):
        """Reparametrize arbitrary regular samples to a uniform arc-length grid."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 7:
            raise InvalidArgumentError("points must have shape (n >= 7, 3)")
        chord = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.any(chord <= 0):
            raise InvalidArgumentError("consecutive samples must be distinct")
        u = np.concatenate([[0.0], np.cumsum(chord)])
        n = n_out or pts.shape[0]
        s_uniform = np.linspace(0.0, u[-1], n)
        resampled = np.column_stack(
            [PchipInterpolator(u, pts[:, i])(s_uniform) for i in range(3)]
        )
        return SpaceCurve(s=s_uniform, points=resampled)


@dataclass(frozen=True)
class FrenetFrame:
    """Orthonormal frame and scalar invariants at one arc-length sample."""

    s: float
    s_hat: np.ndarray
    nu_hat: np.ndarray
    b_hat: np.ndarray
    curvature: float
    torsion: float


def _derivative(values, h, order):
    """FD derivative along axis 0: 4th-order central interior, one-sided edges."""
    n = values.shape[0]
    out = np.empty_like(values)
    if order == 1:
        out[2:-2] = (
            -values[4:] + 8 * values[3:-1] - 8 * values[1:-3] + values[:-4]
        ) / (12 * h)
        for i in (0, 1):
            out[i] = (
                -25 * values[i] + 48 * values[i + 1] - 36 * values[i + 2]
                + 16 * values[i + 3] - 3 * values[i + 4]
            ) / (12 * h)
            out[n - 1 - i] = -(
                -25 * values[n - 1 - i] + 48 * values[n - 2 - i]
                - 36 * values[n - 3 - i] + 16 * values[n - 4 - i]
                - 3 * values[n - 5 - i]
            ) / (12 * h)
    elif order == 2:
        out[2:-2] = (
            -values[4:] + 16 * values[3:-1] - 30 * values[2:-2]
            + 16 * values[1:-3] - values[:-4]
        ) / (12 * h * h)
        for i in (0, 1):
            out[i] = (
                2 * values[i] - 5 * values[i + 1] + 4 * values[i + 2] - values[i + 3]
            ) / (h * h)
            out[n - 1 - i] = (
                2 * values[n - 1 - i] - 5 * values[n - 2 - i]
                + 4 * values[n - 3 - i] - values[n - 4 - i]
            ) / (h * h)
    elif order == 3:
        out[3:-3] = (
            values[:-6] - 8 * values[1:-5] + 13 * values[2:-4]
            - 13 * values[4:-2] + 8 * values[5:-1] - values[6:]
        ) / (8 * h**3)
        for i in (2, n - 3):
            out[i] = (
                values[i + 2] - 2 * values[i + 1] + 2 * values[i - 1] - values[i - 2]
            ) / (2 * h**3)
        for i in (0, 1):
            out[i] = (
                -values[i] + 3 * values[i + 1] - 3 * values[i + 2] + values[i + 3]
            ) / h**3
            out[n - 1 - i] = -(
                -values[n - 1 - i] + 3 * values[n - 2 - i]
                - 3 * values[n - 3 - i] + values[n - 4 - i]
            ) / h**3
    else:
        raise InvalidArgumentError("order must be 1, 2, or 3")
    return out


def frenet_frames(curve, curvature_tol=1e-8):
    """Frames, curvature, and torsion at every sample of an arc-length curve.

    Curvature comes from |r' x r''| / |r'|^3 and torsion from the triple
    product (r' x r'') . r''' / |r' x r''|^2.  Interior stencils are 4th
    order; the two samples at each end use lower-order one-sided stencils.
    """
    h_all = np.diff(curve.s)
    h = float(h_all[0])
    if np.max(np.abs(h_all - h)) > 1e-9 * max(h, 1.0):
        raise InvalidArgumentError("frenet_frames requires a uniform s grid")
    r = curve.points
    d1 = _derivative(r, h, 1)
    d2 = _derivative(r, h, 2)
    d3 = _derivative(r, h, 3)
    speed = np.linalg.norm(d1, axis=1)
    cr = np.cross(d1, d2)
    cr_norm = np.linalg.norm(cr, axis=1)
    curvature = cr_norm / speed**3
    low = curvature <= curvature_tol
    if np.any(low):
        s_bad = curve.s[low]
        raise UndefinedNormalError(
            f"curvature below {curvature_tol:.1e}; the normal is undefined "
            f"for s in [{s_bad.min():.6g}, {s_bad.max():.6g}]",
            s_range=(float(s_bad.min()), float(s_bad.max())),
        )
    torsion = np.einsum("ij,ij->i", cr, d3) / cr_norm**2
    s_hat = d1 / speed[:, None]
    # Gram-Schmidt of r'' against the tangent keeps the frame orthonormal
    # even where the finite differences are least accurate.
    proj = np.einsum("ij,ij->i", d2, s_hat)
    nu = d2 - proj[:, None] * s_hat
    nu_hat = nu / np.linalg.norm(nu, axis=1)[:, None]
    b_hat = np.cross(s_hat, nu_hat)
    return [
        FrenetFrame(
            s=float(curve.s[i]),
            s_hat=s_hat[i],
            nu_hat=nu_hat[i],
            b_hat=b_hat[i],
            curvature=float(curvature[i]),
            torsion=float(torsion[i]),
        )
        for i in range(r.shape[0])
    ]


def rytov_birefringence(tau):
    """Geometric birefringence of torsion: k0 = 0, kappa = (0, tau, 0)."""
    if not np.isfinite(tau):
        raise InvalidArgumentError("tau must be finite")
    return BirefringenceSample(k0=0.0, kappa=np.array([0.0, float(tau), 0.0]))


def rytov_path(curve, curvature_tol=1e-8):
    """TabulatedPath of the curve's geometric birefringence kappa(s)=(0,tau,0)."""
    frames = frenet_frames(curve, curvature_tol=curvature_tol)
    s_nodes = np.array([f.s for f in frames])
    kappa_nodes = np.column_stack(
        [
            np.zeros(len(frames)),
            np.array([f.torsion for f in frames]),
            np.zeros(len(frames)),
        ]
    )
    return TabulatedPath(s_nodes=s_nodes, kappa_nodes=kappa_nodes)


def helix_curve(radius, pitch, n_turns=2.0, n_samples=4001):
    """Arc-length sampled circular helix (a cos t, a sin t, b t).

    Closed forms: curvature a/(a^2+b^2), torsion b/(a^2+b^2).
    """
    if radius <= 0:
        raise InvalidArgumentError("radius must be positive")
    if n_samples < 7:
        raise InvalidArgumentError("n_samples must be at least 7")
    t_max = 2.0 * np.pi * n_turns
    speed = np.hypot(radius, pitch)
    t = np.linspace(0.0, t_max, n_samples)
    pts = np.column_stack(
        [radius * np.cos(t), radius * np.sin(t), pitch * t]
    )
    # t is proportional to arc length for a helix: s = t * sqrt(a^2 + b^2).
    return SpaceCurve(s=t * speed, points=pts)


def load_curve_csv(path, n_out=None):
    """SpaceCurve from a CSV with columns s_index, x, y, z ('#' comments allowed)."""
    # genfromtxt(names=True) would read a leading '#' comment line as the
    # header, so comment lines are stripped before parsing.
    with open(path) as fh:
        body = "".join(ln for ln in fh if not ln.lstrip().startswith("#"))
    rows = np.genfromtxt(io.StringIO(body), delimiter=",", names=True)
    for col in ("s_index", "x", "y", "z"):
        if col not in (rows.dtype.names or ()):
            raise InvalidArgumentError(f"curve CSV is missing column {col!r}")
    order = np.argsort(rows["s_index"])
    pts = np.column_stack([rows["x"][order], rows["y"][order], rows["z"][order]])
    return SpaceCurve.from_samples(pts, n_out=n_out)
