"""Optimization-based colour propagation over a luminance affinity graph.

Each unhinted pixel's chroma is asked to equal the affinity-weighted average
of its neighbours' chroma; hinted pixels are fixed.  With hinted pixels
eliminated this is the square sparse system ``(I - W)_uu x_u = W_uh x_h``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .scribbler import ScribbleMap, Status


@dataclass(frozen=True)
class PropagationConfig:
    window_radius: int = 1
    variance_floor: float = 1e-6
    solver_tolerance: float = 1e-6
    max_iterations: int = 2000
    kernel: str = "gaussian"  # or "correlation"
    kernel_scale: float = 0.6  # Gaussian width relative to the window variance
    min_weight: float = 0.01  # closest neighbour never weighs less than this
    solver: str = "direct"  # or "cg"

    def __post_init__(self):
        if self.window_radius < 1:
            raise ValueError("window_radius must be >= 1")
        if not 0 < self.solver_tolerance < 1:
            raise ValueError("solver_tolerance must lie in (0, 1)")
        if self.kernel not in ("gaussian", "correlation"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.solver not in ("direct", "cg"):
            raise ValueError(f"unknown solver {self.solver!r}")


@dataclass
class PropagationResult:
    a: np.ndarray
    b: np.ndarray
    status: np.ndarray
    converged: bool = True
    iterations: int = 0


def _window_offsets(radius: int):
    return [(du, dv) for du in range(-radius, radius + 1) for dv in range(-radius, radius + 1)
            if (du, dv) != (0, 0)]


def build_affinity(mono: np.ndarray, cfg: PropagationConfig = PropagationConfig()) -> sp.csr_matrix:
    """Row-stochastic neighbour weights ``W`` (zero diagonal) as an ``n x n`` CSR matrix."""
    y = np.asarray(mono, dtype=np.float64)
    h, w = y.shape
    n = h * w
    rad = cfg.window_radius
    offs = _window_offsets(rad)
    pad = np.pad(y, rad, mode="constant", constant_values=np.nan)
    idx = np.pad(np.arange(n).reshape(h, w), rad, mode="constant", constant_values=-1)

    neigh = np.stack([pad[rad + du:rad + du + h, rad + dv:rad + dv + w] for du, dv in offs])
    nidx = np.stack([idx[rad + du:rad + du + h, rad + dv:rad + dv + w] for du, dv in offs])
    inside = nidx >= 0

    # window statistics include the centre pixel
    vals = np.concatenate([neigh, y[None]], axis=0)
    cnt = np.sum(~np.isnan(vals), axis=0)
    mean = np.nansum(vals, axis=0) / cnt
    var = np.nansum((vals - mean) ** 2, axis=0) / cnt
    diff2 = np.where(inside, (neigh - y) ** 2, np.inf)

    if cfg.kernel == "gaussian":
        width = cfg.kernel_scale * np.maximum(var, cfg.variance_floor)
        closest = diff2.min(axis=0)
        width = np.maximum(width, -closest / np.log(cfg.min_weight))
        wts = np.exp(-diff2 / width)
    else:
        sig = np.maximum(var, cfg.variance_floor)
        wts = 1.0 + (np.where(inside, neigh, 0.0) - mean) * (y - mean) / sig
        wts = np.where(inside, np.maximum(wts, 0.0), 0.0)
        flat = wts.sum(axis=0) <= 0
        wts[:, flat] = inside[:, flat]
    wts /= wts.sum(axis=0)

    rows = np.broadcast_to(np.arange(n).reshape(h, w), nidx.shape)[inside]
    return sp.csr_matrix((wts[inside], (rows, nidx[inside])), shape=(n, n))


def _solve_direct(a_uu, rhs):
    lu = spla.splu(a_uu.tocsc())
    return lu.solve(rhs), True, 0


def _solve_cg(a_uu, rhs, cfg: PropagationConfig):
    """CG on the normal equations, Jacobi preconditioned."""
    ata = (a_uu.T @ a_uu).tocsr()
    diag = ata.diagonal()
    precond = spla.LinearOperator(ata.shape, matvec=lambda v: v / diag, dtype=np.float64)
    out = np.empty_like(rhs)
    ok = True
    its = 0
    for k in range(rhs.shape[1]):
        count = [0]

        def cb(_):
            count[0] += 1

        x, info = spla.cg(ata, a_uu.T @ rhs[:, k], rtol=cfg.solver_tolerance,
                          maxiter=cfg.max_iterations, M=precond, callback=cb)
        out[:, k] = x
        ok &= info == 0
        its = max(its, count[0])
    return out, ok, its


def propagate(mono: np.ndarray, hints: ScribbleMap, cfg: PropagationConfig = PropagationConfig(),
              affinity: sp.csr_matrix | None = None) -> PropagationResult:
    """Fill every unhinted pixel's chroma; hinted pixels keep their values exactly."""
    mono = np.asarray(mono, dtype=np.float64)
    hinted = hints.hinted
    if not hinted.any():
        raise ValueError("propagation needs at least one hinted pixel")
    a = hints.a.copy()
    b = hints.b.copy()
    status = hints.status.copy()
    free = ~hinted.ravel()
    if not free.any():
        return PropagationResult(a, b, status)

    wmat = build_affinity(mono, cfg) if affinity is None else affinity
    fi = np.flatnonzero(free)
    hi = np.flatnonzero(~free)
    a_uu = sp.identity(fi.size, format="csr") - wmat[fi][:, fi]
    fixed = np.stack([a.ravel()[hi], b.ravel()[hi]], axis=1)
    rhs = wmat[fi][:, hi] @ fixed

    if cfg.solver == "direct":
        x, ok, its = _solve_direct(a_uu, rhs)
    else:
        x, ok, its = _solve_cg(a_uu, rhs, cfg)
        if not ok:
            warnings.warn(f"propagation did not converge in {cfg.max_iterations} iterations",
                          RuntimeWarning)
    a.ravel()[fi] = x[:, 0]
    b.ravel()[fi] = x[:, 1]
    status.ravel()[fi] = Status.PROPAGATED
    return PropagationResult(a, b, status, converged=bool(ok), iterations=its)
