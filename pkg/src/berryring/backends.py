"""Selectable kernels for the hot inner loop: ordered products of 2x2 steps.

The evolution engine reduces to one primitive: multiply a long sequence of
complex 2x2 step matrices in traversal order,

    Q = U[n-1] @ ... @ U[1] @ U[0].

Two implementations are provided:

* ``numba``: a sequential scalar loop compiled with numba.njit (cached,
  nogil).  Exact left-to-right accumulation, lowest overhead per step.
* ``numpy``: a pairwise tree reduction using batched matmul.  Pure numpy,
  used when numba is unavailable or explicitly selected.

Both are deterministic.  They may differ from each other by floating-point
rounding (different association order), which is far below the integrator's
own truncation error.

Selection: the BERRY_RING_BACKEND environment variable ("numba", "numpy",
or "auto") sets the default at import time; set_backend() overrides it at
runtime.  "auto" means numba if importable, else numpy.
"""

import os

import numpy as np

from .errors import InvalidArgumentError

_ENV_VAR = "BERRY_RING_BACKEND"
_VALID = ("numba", "numpy", "auto")

_backend_choice = None  # resolved lazily; one of "numba", "numpy"
_numba_product = None  # compiled kernel, cached after first build


def _numba_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _build_numba_kernel():
    global _numba_product
    if _numba_product is not None:
        return _numba_product
    import numba

    @numba.njit(cache=True, nogil=True)
    def product_seq(steps):
        a = 1.0 + 0.0j
        b = 0.0 + 0.0j
        c = 0.0 + 0.0j
        d = 1.0 + 0.0j
        for i in range(steps.shape[0]):
            u00 = steps[i, 0, 0]
            u01 = steps[i, 0, 1]
            u10 = steps[i, 1, 0]
            u11 = steps[i, 1, 1]
            na = u00 * a + u01 * c
            nb = u00 * b + u01 * d
            nc = u10 * a + u11 * c
            nd = u10 * b + u11 * d
            a, b, c, d = na, nb, nc, nd
        out = np.empty((2, 2), dtype=np.complex128)
        out[0, 0] = a
        out[0, 1] = b
        out[1, 0] = c
        out[1, 1] = d
        return out

    _numba_product = product_seq
    return _numba_product


def _product_numpy(steps):
    # Pairwise tree: multiply adjacent pairs, keep any odd tail element,
    # repeat until one matrix remains.  Order within each pair is
    # later @ earlier, so the overall traversal order is preserved.
    q = steps
    while q.shape[0] > 1:
        n_pairs = q.shape[0] // 2
        pairs = np.matmul(q[1 : 2 * n_pairs : 2], q[0 : 2 * n_pairs : 2])
        if q.shape[0] % 2:
            q = np.concatenate([pairs, q[-1:]], axis=0)
        else:
            q = pairs
    return q[0]


def available_backends():
    """Names of backends usable on this machine."""
    names = ["numpy"]
    if _numba_available():
        names.insert(0, "numba")
    return names


def _resolve(name):
    if name not in _VALID:
        raise InvalidArgumentError(
            f"unknown backend {name!r}; expected one of {_VALID}"
        )
    if name == "auto":
        return "numba" if _numba_available() else "numpy"
    if name == "numba" and not _numba_available():
        raise InvalidArgumentError("numba backend requested but numba is not installed")
    return name


def set_backend(name):
    """Select the kernel used by ordered_product from here on."""
    global _backend_choice
    _backend_choice = _resolve(name)
    return _backend_choice


def get_backend():
    """Currently selected backend name, resolving the default on first call."""
    global _backend_choice
    if _backend_choice is None:
        _backend_choice = _resolve(os.environ.get(_ENV_VAR, "auto"))
    return _backend_choice


def ordered_product(steps, backend=None):
    """Product of step matrices in traversal order: steps[-1] @ ... @ steps[0].

    steps: complex array of shape (n, 2, 2).  n = 0 yields the identity.
    """
    steps = np.ascontiguousarray(steps, dtype=np.complex128)
    if steps.ndim != 3 or steps.shape[1:] != (2, 2):
        raise InvalidArgumentError("steps must have shape (n, 2, 2)")
    if steps.shape[0] == 0:
        return np.eye(2, dtype=np.complex128)
    choice = _resolve(backend) if backend is not None else get_backend()
    if choice == "numba":
        return _build_numba_kernel()(steps)
    return _product_numpy(steps)
