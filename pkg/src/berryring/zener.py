"""Zener transition probabilities for avoided-crossing birefringence paths.

Routes to p_z:

* perturbative: the lowest-order oscillatory integral
      p_z = (1/4) |integral dtheta e^{i zeta(theta)}|^2,
      zeta(theta) = -2 integral_{s0}^{s(theta)} |kappa| ds',
  valid for planar paths with constant azimuth phi and piecewise-monotone
  polar angle theta(s).
* numeric: |<down(end)| u(s1,s0) |up(start)>|^2 from the evolution engine.
* closed forms: half-circle large/small radius, straight line, ring estimate.

The Bessel function J0 used by the closed forms is implemented here (power
series with compensated summation for |x| <= 12, Hankel asymptotic series
beyond), accurate to 1e-10 on [0, 30].
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import AnalysisError, InvalidArgumentError, SearchError
from .evolution import IntegrationConfig, evolve
from .paths import HalfCirclePath
from .spinor import adjoint, eigenbasis

_J0_CROSSOVER = 12.0


def _j0_series(x):
    # J0(x) = sum_m (-1)^m (x^2/4)^m / (m!)^2, Kahan-compensated.
    q = 0.25 * x * x
    term = 1.0
    total = 0.0
    comp = 0.0
    for m in range(1, 200):
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        term *= -q / (m * m)
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            break
    return total


def _j0_asymptotic(x):
    # Hankel expansion: J0 = sqrt(2/(pi x)) (P cos chi - Q sin chi),
    # chi = x - pi/4; terms t_m with t_0 = 1, t_m = t_{m-1} (2m-1)^2/(8 m x)
    # feed P = t0 - t2 + t4 - ... and Q = -t1 + t3 - ...; the series is
    # asymptotic, so it is truncated at its smallest term.
    p_sum = 1.0
    q_sum = 0.0
    term = 1.0
    prev = math.inf
    for m in range(1, 60):
        term *= (2 * m - 1) ** 2 / (8.0 * m * x)
        if abs(term) >= prev:
            break
        prev = abs(term)
        k = m % 4
        if k == 1:
            q_sum -= term
        elif k == 2:
            p_sum -= term
        elif k == 3:
            q_sum += term
        else:
            p_sum += term
        if abs(term) < 1e-18:
            break
    chi = x - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (
        p_sum * math.cos(chi) - q_sum * math.sin(chi)
    )


def bessel_j0(x):
    """J0(x), in-module implementation (series + asymptotic crossover at 12)."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    out = np.empty(flat.shape)
    for i, xi in enumerate(flat):
        a = abs(float(xi))
        out[i] = _j0_series(a) if a <= _J0_CROSSOVER else _j0_asymptotic(a)
    if scalar:
        return float(out[0])
    return out.reshape(np.atleast_1d(arr).shape)


@dataclass(frozen=True)
class ZenerResult:
    """Transition probability with its provenance and validity flag.

    within_validity is False when the raw value falls outside [0, 1 + 1e-9];
    perturbative values beyond validity are reported raw, never clamped.
    """

    p_z: float
    method: str
    within_validity: bool


def _make_result(p_z, method):
    return ZenerResult(
        p_z=float(p_z),
        method=method,
        within_validity=bool(-1e-12 <= p_z <= 1.0 + 1e-9),
    )


def _monotone_runs(values, tol=0.0):
    """Index ranges [i0, i1] over which values is monotone (non-reversing)."""
    d = np.diff(values)
    runs = []
    start = 0
    direction = 0
    for i, di in enumerate(d):
        sign = 0 if di == 0 else (1 if di > 0 else -1)
        if direction == 0:
            direction = sign
        elif sign != 0 and sign != direction:
            runs.append((start, i))
            start = i
            direction = sign
    runs.append((start, len(values) - 1))
    return runs


def _pz_quadrature(path, n_quad):
    lo, hi = path.domain
    m = max(8 * n_quad + 1, 4097)
    s = np.linspace(lo, hi, m)
    _, kap = path.sample(s)
    mag = np.linalg.norm(kap, axis=1)

    # Planarity with constant azimuth: the transverse components must be
    # a non-negative multiple of one fixed direction (cos phi0, sin phi0).
    perp = np.hypot(kap[:, 0], kap[:, 1])
    scale = max(np.max(mag), 1e-300)
    i0 = int(np.argmax(perp))
    if perp[i0] > 1e-12 * scale:
        c0, s0 = kap[i0, 0] / perp[i0], kap[i0, 1] / perp[i0]
        off_plane = np.abs(kap[:, 0] * s0 - kap[:, 1] * c0)
        along = kap[:, 0] * c0 + kap[:, 1] * s0
        if np.max(off_plane) > 1e-9 * scale or np.min(along) < -1e-9 * scale:
            raise InvalidArgumentError(
                "path is not planar with constant azimuth phi; the "
                "perturbative planar integral does not apply"
            )

    with np.errstate(invalid="ignore"):
        theta = np.arccos(np.clip(kap[:, 2] / np.where(mag > 0, mag, 1.0), -1.0, 1.0))
    zeta_grid = -2.0 * np.concatenate([[0.0], cumulative_trapezoid(mag, s)])

    integral = 0.0 + 0.0j
    for a, b in _monotone_runs(theta):
        th_a, th_b = theta[a], theta[b]
        if abs(th_b - th_a) < 1e-12:
            continue
        n_run = max(16, int(round(n_quad * abs(th_b - th_a) / np.pi)) + 1)
        th = np.linspace(th_a, th_b, n_run)
        seg_theta = theta[a : b + 1]
        seg_s = s[a : b + 1]
        if seg_theta[0] > seg_theta[-1]:
            seg_theta = seg_theta[::-1]
            seg_s = seg_s[::-1]
        s_of_th = np.interp(th, seg_theta, seg_s)
        zeta = np.interp(s_of_th, s, zeta_grid)
        integral += trapezoid(np.exp(1j * zeta), th)
    return 0.25 * abs(integral) ** 2


def pz_perturbative_planar(path, n_quad=512, tol=1e-6, max_doublings=14):
    """Lowest-order Zener probability for a planar constant-phi path.

    The oscillatory integral is evaluated on uniform theta grids per
    monotone run; n_quad is doubled until the value moves by less than tol.
    """
    if n_quad < 16:
        raise InvalidArgumentError("n_quad must be at least 16")
    prev = _pz_quadrature(path, n_quad)
    for _ in range(max_doublings):
        n_quad *= 2
        cur = _pz_quadrature(path, n_quad)
        if abs(cur - prev) < tol:
            return _make_result(cur, "perturbative-integral")
        prev = cur
    raise AnalysisError(
        f"perturbative quadrature did not stabilize to {tol:g} after doubling"
    )


def transition_probability(path, config=None, backend=None):
    """Numeric p_z: up-to-down conversion over the path from the evolution engine."""
    lo, hi = path.domain
    v_start = eigenbasis(path.kappa_at(lo).kappa, tol=1e-9)
    v_end = eigenbasis(path.kappa_at(hi).kappa, tol=1e-9)
    u = evolve(path, config=config, backend=backend)
    w = adjoint(v_end) @ u @ v_start
    return _make_result(abs(w[1, 0]) ** 2, "numeric-monodromy")


def pz_half_circle_large(lam):
    """Closed form (pi^2/4) J0(2 Lambda^2)^2, accurate for Lambda >~ 1."""
    if lam < 0:
        raise InvalidArgumentError("lam must be non-negative")
    return (np.pi**2 / 4.0) * bessel_j0(2.0 * lam * lam) ** 2


def pz_half_circle_small(lam):
    """Closed form J0(pi Lambda^2 / sqrt(2))^2, accurate for 0 <= Lambda <~ 1."""
    if lam < 0:
        raise InvalidArgumentError("lam must be non-negative")
    return bessel_j0(np.pi * lam * lam / np.sqrt(2.0)) ** 2


def pz_straight_line(delta, gamma=1.0):
    """Closed form exp(-pi delta/gamma) for the straight-line avoided crossing."""
    if delta < 0:
        raise InvalidArgumentError("delta must be non-negative")
    if gamma <= 0:
        raise InvalidArgumentError("gamma must be positive")
    return float(np.exp(-np.pi * delta / gamma))


def pz_ring_estimate(alpha, beta=5.0, lambda1=1.022, gamma=1.0):
    """Ring estimate exp(-pi beta alpha^2 / (lambda1 gamma^2)); valid when << 1."""
    if beta <= 0 or lambda1 <= 0 or gamma <= 0:
        raise InvalidArgumentError("beta, lambda1, gamma must be positive")
    return float(np.exp(-np.pi * beta * alpha * alpha / (lambda1 * gamma * gamma)))


def _golden_min(f, a, b, resolution):
    """Golden-section minimum of f on [a, b] to bracket width < resolution."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > resolution:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def find_lambda_zeros(
    count,
    resolution=1e-4,
    gamma=1.0,
    config=None,
    backend=None,
    lam_start=0.3,
    scan_step=0.02,
    zero_threshold=1e-4,
):
    """First `count` zeros Lambda_n of the half-circle transition probability.

    Zeros are the local minima of the numeric p_z(Lambda) whose refined value
    falls below zero_threshold; each bracket is refined by golden-section
    search until the Lambda uncertainty is below `resolution`.
    """
    if count < 1:
        raise InvalidArgumentError("count must be at least 1")
    if resolution <= 0:
        raise InvalidArgumentError("resolution must be positive")
    cfg = config or IntegrationConfig()
    cache = {}

    def p_of(lam):
        key = round(float(lam), 12)
        if key not in cache:
            path = HalfCirclePath(lam=float(lam), gamma=gamma)
            cache[key] = transition_probability(path, config=cfg, backend=backend).p_z
        return cache[key]

    lam_max = math.sqrt(1.3 + (count + 2) * math.pi / 2.0) + 0.5
    zeros = []
    lam_prev2, lam_prev1 = lam_start, lam_start + scan_step
    p_prev2, p_prev1 = p_of(lam_prev2), p_of(lam_prev1)
    lam = lam_start + 2 * scan_step
    while len(zeros) < count:
        if lam > lam_max:
            raise SearchError(
                f"failed to bracket {count} zeros below Lambda = {lam_max:.3f}"
            )
        p_cur = p_of(lam)
        if p_prev1 < p_prev2 and p_prev1 < p_cur:
            lam_min = _golden_min(p_of, lam_prev2, lam, resolution)
            if p_of(lam_min) < zero_threshold:
                zeros.append(lam_min)
        lam_prev2, p_prev2 = lam_prev1, p_prev1
        lam_prev1, p_prev1 = lam, p_cur
        lam += scan_step
    zeros = np.array(zeros)
    if abs(zeros[0] - 1.022) > 5e-3:
        raise AnalysisError(
            f"first zero {zeros[0]:.5f} is outside 1.022 +/- 0.005; "
            "integration resolution is likely insufficient"
        )
    return zeros
