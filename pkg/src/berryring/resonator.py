"""Directional-coupler algebra, ring scattering, and transmission line shapes.

The ring resonator couples two guided ports through a lossless directional
coupler (transmission t = (1-xi_c)e^{i theta_t}, cross coupling r with
|t|^2 + |r|^2 = 1).  One round trip of the ring multiplies the circulating
field by the monodromy M, attenuated by (1-xi_l).  Summing the round trips
gives the output scattering matrix

    S = (M_eff - t I) (t* M_eff - I)^{-1},   M_eff = (1 - xi_l) M,

whose diagonal element near a resonance reduces to the familiar
(xi_l - xi_c - i vartheta)/(xi_l + xi_c - i vartheta) line shape.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AnalysisError,
    ContractViolationError,
    InvalidArgumentError,
    SingularMatrixError,
)
from .evolution import IntegrationConfig, monodromy
from .paths import RingParams, standard_ring
from .spinor import inverse

DEFAULT_XI_C = 1e-2
DEFAULT_XI_L = 1e-4
DEFAULT_ALPHA_RES = 0.02


@dataclass(frozen=True)
class CouplerParams:
    """Lossless coupler transmission/cross amplitudes plus the ring loss."""

    xi_c: float = DEFAULT_XI_C
    xi_l: float = DEFAULT_XI_L
    theta_t: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.xi_c <= 1.0:
            raise InvalidArgumentError("xi_c must lie in [0, 1]")
        if not 0.0 <= self.xi_l <= 1.0:
            raise InvalidArgumentError("xi_l must lie in [0, 1]")

    @property
    def t(self):
        return (1.0 - self.xi_c) * np.exp(1j * self.theta_t)

    @property
    def r(self):
        return float(np.sqrt(max(0.0, 1.0 - (1.0 - self.xi_c) ** 2)))

    def matrix(self):
        """Block-diagonal 4x4 coupler matrix acting per SOP."""
        t, r = self.t, self.r
        block = np.array([[t, r], [-np.conj(r), np.conj(t)]], dtype=complex)
        out = np.zeros((4, 4), dtype=complex)
        out[:2, :2] = block
        out[2:, 2:] = block
        return out


def coupler_apply(params, a_side):
    """Apply the 4x4 coupler matrix to (E_up_a1, E_up_a2, E_down_a1, E_down_a2)."""
    a = np.asarray(a_side, dtype=complex)
    if a.shape != (4,):
        raise InvalidArgumentError("a_side must be a length-4 complex vector")
    t, r = params.t, params.r
    if abs(abs(t) ** 2 + abs(r) ** 2 - 1.0) > 1e-12:
        raise InvalidArgumentError("coupler params are not unitary")
    return params.matrix() @ a


def s_matrix(m, params):
    """Ring scattering matrix S = (M_eff - t I)(t* M_eff - I)^{-1}.

    M_eff = (1 - xi_l) M applies the round-trip loss.  Both factors are
    rational functions of M alone, so they commute; the commutator is
    asserted below 1e-10 as a consistency check.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise InvalidArgumentError("m must be a 2x2 matrix")
    t = params.t
    m_eff = (1.0 - params.xi_l) * m
    a = m_eff - t * np.eye(2)
    b = np.conj(t) * m_eff - np.eye(2)
    det_b = b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]
    if abs(det_b) <= 1e-14:
        raise SingularMatrixError(
            "resonance denominator t* M - I is singular; the lossless "
            "critically-degenerate configuration has no finite S"
        )
    b_inv = inverse(b)
    s_left = a @ b_inv
    s_right = b_inv @ a
    if np.max(np.abs(s_left - s_right)) >= 1e-10:
        raise ContractViolationError(
            "scattering factors failed to commute; monodromy input is corrupt"
        )
    return s_left


def transmission_near_resonance(vartheta, xi_l, xi_c, theta_t=0.0, with_phase=False):
    """Near-resonance transmission amplitude (xi_l - xi_c - i vt)/(xi_l + xi_c - i vt).

    with_phase=True multiplies by the coupler phase factor e^{i theta_t}.
    """
    if not 0.0 <= xi_l < 1.0 or not 0.0 <= xi_c < 1.0:
        raise InvalidArgumentError("xi_l and xi_c must lie in [0, 1)")
    vt = np.asarray(vartheta, dtype=float)
    den = xi_l + xi_c - 1j * vt
    if np.any(np.abs(den) == 0.0):
        raise SingularMatrixError(
            "transmission denominator xi_l + xi_c - i vartheta vanishes; a "
            "lossless uncoupled ring has no line shape at resonance"
        )
    amp = (xi_l - xi_c - 1j * vt) / den
    if with_phase:
        amp = np.exp(1j * theta_t) * amp
    if np.ndim(vartheta) == 0:
        return complex(amp)
    return amp


def transmission_critical(vartheta, q):
    """Critically-coupled transmission probability (Q vt)^2 / (1 + (Q vt)^2)."""
    if q <= 0:
        raise InvalidArgumentError("q must be positive")
    x = (q * np.asarray(vartheta, dtype=float)) ** 2
    out = x / (1.0 + x)
    if np.ndim(vartheta) == 0:
        return float(out)
    return out


def linewidth_phase(rel_linewidth, ring_length, wavelength):
    """Round-trip phase linewidth delta_vartheta = 2 pi (dw/w) (L / lambda)."""
    if ring_length <= 0 or wavelength <= 0:
        raise InvalidArgumentError("ring_length and wavelength must be positive")
    if rel_linewidth < 0:
        raise InvalidArgumentError("rel_linewidth must be non-negative")
    return 2.0 * np.pi * rel_linewidth * ring_length / wavelength


def broadened_transmission(vartheta, q, delta_vartheta):
    """Lorentzian-averaged transmission at critical coupling (closed form).

    T_bar = 1 - [1/(1 + Q dvt)] / [1 + (Q vt / (1 + Q dvt))^2]; delta_vartheta
    is the Lorentzian half width of the round-trip phase.
    """
    if q <= 0:
        raise InvalidArgumentError("q must be positive")
    if delta_vartheta < 0:
        raise InvalidArgumentError("delta_vartheta must be non-negative")
    vt = np.asarray(vartheta, dtype=float)
    g = 1.0 + q * delta_vartheta
    out = 1.0 - (1.0 / g) / (1.0 + (q * vt / g) ** 2)
    if np.ndim(vartheta) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class SweepResult:
    """Ordered per-alpha observables of the modulator sweep."""

    alpha: np.ndarray
    m12_sq: np.ndarray
    arg_m11: np.ndarray  # unwrapped along the sweep
    arg_m22: np.ndarray  # unwrapped along the sweep
    p11: np.ndarray
    p21: np.ndarray


def _sweep_point(alpha, ring_params, coupler, config, backend):
    ring = standard_ring(alpha, ring_params)
    m = monodromy(ring, config=config, backend=backend)
    s = s_matrix(m, coupler)
    return (
        abs(m[0, 1]) ** 2,
        float(np.angle(m[0, 0])),
        float(np.angle(m[1, 1])),
        abs(s[0, 0]) ** 2,
        abs(s[1, 0]) ** 2,
    )


def modulator_sweep(
    alpha_values,
    ring_params=None,
    coupler=None,
    config=None,
    backend=None,
    max_workers=None,
):
    """Monodromy and scattering observables for each alpha, in input order.

    max_workers > 1 evaluates the (pure, independent) alpha points on a
    thread pool; assembly order and results are identical to the serial run.
    """
    alphas = np.asarray(alpha_values, dtype=float)
    if alphas.ndim != 1 or alphas.size == 0:
        raise InvalidArgumentError("alpha_values must be a non-empty 1-d array")
    ring_params = ring_params or RingParams()
    coupler = coupler or CouplerParams()
    config = config or IntegrationConfig()

    def work(a):
        return _sweep_point(float(a), ring_params, coupler, config, backend)

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(work, alphas))
    else:
        rows = [work(a) for a in alphas]
    m12_sq, raw11, raw22, p11, p21 = (np.array(col) for col in zip(*rows))
    return SweepResult(
        alpha=alphas,
        m12_sq=m12_sq,
        arg_m11=np.unwrap(raw11),
        arg_m22=np.unwrap(raw22),
        p11=p11,
        p21=p21,
    )


def _half_crossing(xs, ys, i_ext, level, direction):
    """x where ys crosses `level`, scanning from i_ext in +-1 direction."""
    i = i_ext
    while 0 <= i + direction < len(ys):
        j = i + direction
        if (ys[i] - level) * (ys[j] - level) <= 0 and ys[i] != ys[j]:
            frac = (level - ys[i]) / (ys[j] - ys[i])
            return xs[i] + frac * (xs[j] - xs[i])
        i = j
    raise AnalysisError("no half-level crossing found on one side of the extremum")


def _fwhm_once(xs, ys, orientation, base):
    if orientation == "dip":
        i_ext = int(np.argmin(ys))
        level = 0.5 * (base + ys[i_ext])
    else:
        i_ext = int(np.argmax(ys))
        level = 0.5 * (base + ys[i_ext])
    left = _half_crossing(xs, ys, i_ext, level, -1)
    right = _half_crossing(xs, ys, i_ext, level, +1)
    return float(right - left), float(xs[i_ext])


def fwhm(xs, ys, orientation="dip", refine=None, refine_points=257, max_refines=8):
    """Full width at half maximum (or half depth) by linear interpolation.

    The half level is midway between the extremum and the baseline (the
    curve's opposite extreme).  When `refine` is given (a vectorized callable
    x -> y), the neighborhood of the extremum is re-swept at increasing
    resolution until the width is stable to 1%.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 5:
        raise InvalidArgumentError("xs and ys must be equal-length 1-d arrays (n >= 5)")
    if orientation not in ("dip", "peak"):
        raise InvalidArgumentError("orientation must be 'dip' or 'peak'")
    base = float(np.max(ys)) if orientation == "dip" else float(np.min(ys))
    width, center = _fwhm_once(xs, ys, orientation, base)
    if refine is None:
        return width
    for _ in range(max_refines):
        lo = center - 1.2 * width
        hi = center + 1.2 * width
        xs_f = np.linspace(lo, hi, refine_points)
        ys_f = np.asarray(refine(xs_f), dtype=float)
        new_width, center = _fwhm_once(xs_f, ys_f, orientation, base)
        if abs(new_width - width) <= 0.01 * width:
            return new_width
        width = new_width
    raise AnalysisError("fwhm refinement did not stabilize to 1%")


def adiabatic_alpha_fwhm(xi_c=DEFAULT_XI_C, xi_l=DEFAULT_XI_L, ring_params=None):
    """Adiabatic-side estimate of the resonance width in alpha.

    The near-resonance dip has full width 2(xi_c + xi_l) in the round-trip
    phase; the differential round-trip phase slews at 4 * b_width * beta /
    gamma per unit alpha on the flat-top window, so the width maps to

        delta_alpha = 2 (xi_c + xi_l) * gamma / (4 * b_width * beta).
    """
    p = ring_params or RingParams()
    slope = 4.0 * p.b_width * p.beta / p.gamma
    return 2.0 * (xi_c + xi_l) / slope


def calibrate_theta_t(
    alpha_res=DEFAULT_ALPHA_RES, ring_params=None, config=None, backend=None
):
    """Coupler phase that puts the resonance dip at alpha_res.

    The dip condition is cos(theta_t) = Re M11(alpha_res) (resonance of the
    ring eigenphase against the coupler phase), solved on the branch
    theta_t = -acos(Re M11) that makes the deep dip sit at +alpha_res.
    """
    ring = standard_ring(alpha_res, ring_params)
    m = monodromy(ring, config=config, backend=backend)
    re_m11 = float(np.clip(np.real(m[0, 0]), -1.0, 1.0))
    return -float(np.arccos(re_m11))
