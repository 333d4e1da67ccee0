"""Hot numeric kernels, JIT-compiled when numba is available.

The per-frequency capacity bound is evaluated millions of times by the
quadrature oracle, grid emission, and sweeps, so it gets a compiled
inner loop.  Set ``QUDUCT_DISABLE_NUMBA=1`` (or uninstall numba) to fall
back to the pure-numpy implementation; the flag is read once at import.
Both paths produce identical results and are compared for speed in
``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import os

import numpy as np

_LOG2 = np.log(2.0)


def _capacity_bound_numpy(eta: np.ndarray, n_add: np.ndarray) -> np.ndarray:
    """Per-use capacity upper bound of a thermal-loss channel, elementwise.

    [eta * N * ln(N) - M * ln(M)] / ((1 - eta) ln 2) with
    M = 1 - eta(1 - N), zero for n_add >= 1 (no quantum capacity) and for
    eta <= 0, with the 0*log(0) = 0 convention and a floor at zero.
    ln(M) is evaluated as log1p(-eta(1-N)) so the bound stays accurate
    deep in the lineshape tails where M is within a few ulp of 1.
    """
    eta = np.asarray(eta, dtype=np.float64)
    n_add = np.asarray(n_add, dtype=np.float64)
    eta, n_add = np.broadcast_arrays(eta, n_add)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = eta * (1.0 - n_add)
        t1 = np.where(
            n_add > 0.0, eta * n_add * np.log(np.where(n_add > 0.0, n_add, 1.0)), 0.0
        )
        t2 = (1.0 - x) * np.log1p(np.minimum(-x, 0.0))
        value = (t1 - t2) / ((1.0 - eta) * _LOG2)
    value = np.where((n_add >= 1.0) | (eta <= 0.0), 0.0, value)
    value = np.where(eta >= 1.0, np.nan, value)
    return np.maximum(value, 0.0)


_want_numba = os.environ.get("QUDUCT_DISABLE_NUMBA", "0") in ("", "0")
if _want_numba:
    try:
        from numba import njit
    except ImportError:
        _want_numba = False

if _want_numba:

    @njit(cache=True)
    def _capacity_bound_flat(eta, n_add, out):
        log2 = np.log(2.0)
        for i in range(eta.shape[0]):
            e = eta[i]
            n = n_add[i]
            if n >= 1.0 or e <= 0.0:
                out[i] = 0.0
                continue
            if e >= 1.0:
                out[i] = np.nan
                continue
            x = e * (1.0 - n)
            t1 = e * n * np.log(n) if n > 0.0 else 0.0
            t2 = (1.0 - x) * np.log1p(-x)
            v = (t1 - t2) / ((1.0 - e) * log2)
            out[i] = v if v > 0.0 else 0.0
        return out

    def capacity_bound_array(eta, n_add):
        eta = np.asarray(eta, dtype=np.float64)
        n_add = np.asarray(n_add, dtype=np.float64)
        eta, n_add = np.broadcast_arrays(eta, n_add)
        shape = eta.shape
        out = np.empty(eta.size, dtype=np.float64)
        _capacity_bound_flat(
            np.ascontiguousarray(eta).ravel(),
            np.ascontiguousarray(n_add).ravel(),
            out,
        )
        return out.reshape(shape)

    USING_NUMBA = True
else:
    capacity_bound_array = _capacity_bound_numpy
    USING_NUMBA = False

capacity_bound_array.__doc__ = _capacity_bound_numpy.__doc__
