"""Parametric birefringence paths kappa(s) and their composition into rings.

Every path maps an arc-length coordinate s to a BirefringenceSample.  Paths
are immutable descriptions; evaluation is pure, and the vectorized
``sample`` method is the fast entry point used by the evolution engine.

The named families:

* HalfCirclePath: kappa = gamma*(sqrt(L^2 - (gamma s)^2), 0, gamma s) on
  s in [-L/gamma, +L/gamma]; constant magnitude gamma*L.
* StraightLinePath: kappa = delta*(0, 1, gamma s); an avoided crossing with
  minimum gap delta at s = 0.
* DiameterPath: kappa = -(0, 0, lambda1 gamma^2 s / beta) on |s| <= beta/gamma,
  a straight pass through the origin along axis 3.
* FermiStepPerturbation: kappa2 = alpha / (1 + exp(A[(gamma s/beta)^2 - B^2])),
  a flat-top window of half-width B*beta/gamma with steep edges.
* RingPath: ordered segments traversed back to back, closed in kappa space.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidArgumentError
from .spinor import BirefringenceSample

_EXP_CLIP = 700.0  # exp() overflow guard; the tails are exactly 0/alpha anyway


def _as_scalar_array(s):
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    if arr.ndim != 1:
        raise InvalidArgumentError("arc-length samples must be scalars or 1-d arrays")
    return arr


class _PathBase:
    """Shared domain bookkeeping for all concrete paths."""

    #: (s_lo, s_hi) inclusive arc-length domain
    domain = (0.0, 0.0)
    #: constant background wavenumber added as k0 to every sample
    k0 = 0.0

    @property
    def length(self):
        return self.domain[1] - self.domain[0]

    def _check_domain(self, s):
        lo, hi = self.domain
        tol = 1e-9 * max(1.0, abs(lo), abs(hi))
        if np.any(s < lo - tol) or np.any(s > hi + tol):
            raise DomainError(
                f"s outside path domain [{lo:.6g}, {hi:.6g}]"
            )

    def kappa_at(self, s):
        """BirefringenceSample at a single arc-length position."""
        arr = _as_scalar_array(s)
        if arr.size != 1:
            raise InvalidArgumentError("kappa_at takes a scalar; use sample for arrays")
        k0s, kap = self.sample(arr)
        return BirefringenceSample(k0=float(k0s[0]), kappa=kap[0])

    def sample(self, s):
        """Vectorized evaluation: returns (k0 array (n,), kappa array (n, 3))."""
        raise NotImplementedError


def kappa_at(path, s):
    """Free-function form of path.kappa_at(s)."""
    return path.kappa_at(s)


@dataclass(frozen=True)
class HalfCirclePath(_PathBase):
    lam: float
    gamma: float = 1.0
    k0: float = 0.0

    def __post_init__(self):
        if self.lam < 0:
            raise InvalidArgumentError("lam must be non-negative")
        if self.gamma <= 0:
            raise InvalidArgumentError("gamma must be positive")

    @property
    def domain(self):
        h = self.lam / self.gamma
        return (-h, h)

    def sample(self, s):
        s = _as_scalar_array(s)
        self._check_domain(s)
        g = self.gamma
        rad2 = np.maximum(self.lam**2 - (g * s) ** 2, 0.0)
        kap = np.column_stack([g * np.sqrt(rad2), np.zeros_like(s), g * g * s])
        return np.full(s.shape, self.k0), kap


@dataclass(frozen=True)
class StraightLinePath(_PathBase):
    delta: float
    gamma: float = 1.0
    span_units: float = 8.0  # domain is |gamma s| <= span_units
    k0: float = 0.0

    def __post_init__(self):
        if self.delta < 0:
            raise InvalidArgumentError("delta must be non-negative")
        if self.gamma <= 0:
            raise InvalidArgumentError("gamma must be positive")
        if self.span_units <= 0:
            raise InvalidArgumentError("span_units must be positive")

    @property
    def domain(self):
        h = self.span_units / self.gamma
        return (-h, h)

    def sample(self, s):
        s = _as_scalar_array(s)
        self._check_domain(s)
        d = self.delta
        kap = np.column_stack(
            [np.zeros_like(s), np.full(s.shape, d), d * self.gamma * s]
        )
        return np.full(s.shape, self.k0), kap


@dataclass(frozen=True)
class FermiStepPerturbation:
    """Flat-top window amplitude for the axis-2 component on the diameter."""

    alpha: float
    a_sharp: float = 50.0
    b_width: float = 0.6
    beta: float = 5.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.beta <= 0 or self.gamma <= 0:
            raise InvalidArgumentError("beta and gamma must be positive")

    def value(self, s):
        s = _as_scalar_array(s)
        x = (self.gamma * s / self.beta) ** 2 - self.b_width**2
        return self.alpha / (1.0 + np.exp(np.clip(self.a_sharp * x, -_EXP_CLIP, _EXP_CLIP)))


@dataclass(frozen=True)
class DiameterPath(_PathBase):
    """Straight pass through the origin, optionally with a window perturbation."""

    beta: float = 5.0
    lambda1: float = 1.022
    gamma: float = 1.0
    perturbation: FermiStepPerturbation | None = None
    k0: float = 0.0

    def __post_init__(self):
        if self.beta <= 0 or self.gamma <= 0:
            raise InvalidArgumentError("beta and gamma must be positive")

    @property
    def domain(self):
        h = self.beta / self.gamma
        return (-h, h)

    def sample(self, s):
        s = _as_scalar_array(s)
        self._check_domain(s)
        g = self.gamma
        k3 = -self.lambda1 * g * g * s / self.beta
        k2 = (
            self.perturbation.value(s)
            if self.perturbation is not None
            else np.zeros_like(s)
        )
        kap = np.column_stack([np.zeros_like(s), k2, k3])
        return np.full(s.shape, self.k0), kap


@dataclass(frozen=True)
class TabulatedPath(_PathBase):
    """Piecewise-linear kappa(s) through given (s_i, kappa_i) samples."""

    s_nodes: np.ndarray
    kappa_nodes: np.ndarray
    k0: float = 0.0

    def __post_init__(self):
        s_nodes = np.asarray(self.s_nodes, dtype=float)
        kappa_nodes = np.asarray(self.kappa_nodes, dtype=float)
        if s_nodes.ndim != 1 or s_nodes.size < 2:
            raise InvalidArgumentError("need at least two arc-length nodes")
        if np.any(np.diff(s_nodes) <= 0):
            raise InvalidArgumentError("arc-length nodes must increase strictly")
        if kappa_nodes.shape != (s_nodes.size, 3):
            raise InvalidArgumentError("kappa_nodes must have shape (n, 3)")
        object.__setattr__(self, "s_nodes", s_nodes)
        object.__setattr__(self, "kappa_nodes", kappa_nodes)

    @property
    def domain(self):
        return (float(self.s_nodes[0]), float(self.s_nodes[-1]))

    def sample(self, s):
        s = _as_scalar_array(s)
        self._check_domain(s)
        kap = np.column_stack(
            [np.interp(s, self.s_nodes, self.kappa_nodes[:, i]) for i in range(3)]
        )
        return np.full(s.shape, self.k0), kap


@dataclass(frozen=True)
class RingPath(_PathBase):
    """Closed composite path; global arc length starts at 0 at the coupler."""

    segments: tuple
    closure_tol: float = 1e-9
    k0: float = 0.0

    def __post_init__(self):
        if not self.segments:
            raise InvalidArgumentError("a ring needs at least one segment")
        object.__setattr__(self, "segments", tuple(self.segments))
        lengths = np.array([seg.length for seg in self.segments], dtype=float)
        offsets = np.concatenate([[0.0], np.cumsum(lengths)])
        object.__setattr__(self, "_offsets", offsets)
        ends = []
        for seg in self.segments:
            lo, hi = seg.domain
            _, kap_pair = seg.sample(np.array([lo, hi]))
            ends.append(kap_pair)
        for i in range(len(ends)):
            gap = float(np.linalg.norm(ends[i][1] - ends[(i + 1) % len(ends)][0]))
            if gap > self.closure_tol:
                where = "closure" if i == len(ends) - 1 else f"junction {i}->{i + 1}"
                raise InvalidArgumentError(
                    f"ring is not continuous in kappa space at {where} (gap {gap:.3e})"
                )

    @property
    def domain(self):
        return (0.0, float(self._offsets[-1]))

    @property
    def offsets(self):
        """Global arc lengths of segment boundaries, 0 through the total length."""
        return np.array(self._offsets)

    def sample(self, s):
        s = _as_scalar_array(s)
        self._check_domain(s)
        total = self._offsets[-1]
        s = np.clip(s, 0.0, total)
        idx = np.searchsorted(self._offsets[1:-1], s, side="right")
        k0s = np.empty(s.shape)
        kap = np.empty((s.size, 3))
        for i, seg in enumerate(self.segments):
            m = idx == i
            if not np.any(m):
                continue
            local = seg.domain[0] + (s[m] - self._offsets[i])
            lo, hi = seg.domain
            k0_i, kap_i = seg.sample(np.clip(local, lo, hi))
            k0s[m] = k0_i
            kap[m] = kap_i
        return k0s + self.k0, kap


@dataclass(frozen=True)
class RingParams:
    """Geometry constants of the standard modulator ring."""

    lambda1: float = 1.022
    beta: float = 5.0
    gamma: float = 1.0
    a_sharp: float = 50.0
    b_width: float = 0.6


def standard_ring(alpha, params=None, k0=0.0):
    """Closed ring: half circle then diameter, with the axis-2 window drive.

    The traversal starts at kappa = (0, 0, -lambda1*gamma), runs through the
    half circle to (0, 0, +lambda1*gamma), then back down the diameter.  The
    coupler sits at the starting junction, the point farthest from the
    degeneracy at the origin.
    """
    p = params or RingParams()
    if p.beta <= 0 or p.gamma <= 0:
        raise InvalidArgumentError("beta and gamma must be positive")
    half = HalfCirclePath(lam=p.lambda1, gamma=p.gamma)
    drive = FermiStepPerturbation(
        alpha=alpha, a_sharp=p.a_sharp, b_width=p.b_width, beta=p.beta, gamma=p.gamma
    )
    diam = DiameterPath(
        beta=p.beta, lambda1=p.lambda1, gamma=p.gamma, perturbation=drive
    )
    return RingPath(segments=(half, diam), k0=k0)
