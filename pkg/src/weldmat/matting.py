"""Closed-form matting: Laplacian assembly and the constrained alpha solve.

The matting Laplacian is assembled from every 3x3 window fully inside the
image: window k with mean mu_k and (biased) variance var_k contributes

    delta_ij - (1/9) * (1 + (I_i - mu_k)(I_j - mu_k) / (eps/9 + var_k))

to entry (i, j) for every pixel pair in the window. Each window block is
symmetric positive semidefinite with zero row sums, so the assembled L is
too, and constant vectors lie in its nullspace.

Trimap constraints are handled by elimination: alpha is fixed on known
pixels and L_UU alpha_U = -L_UK s is solved for the unknown block only.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (
    DimensionMismatch,
    ImageTooSmall,
    NoKnownPixels,
    SolverDivergence,
)
from .raster import check_float_raster, check_trimap

__all__ = [
    "MattingParams",
    "MattingSystem",
    "AlphaMatte",
    "build_matting_laplacian",
    "partition_system",
    "solve_alpha",
    "energy",
]

WINDOW_AREA = 9

# unknown blocks at or below this size use a direct sparse factorization;
# larger systems run Jacobi-preconditioned CG
DIRECT_SOLVE_MAX_UNKNOWNS = 20_000


@dataclass(frozen=True)
class MattingParams:
    epsilon: float = 1e-7
    window_radius: int = 1
    solver_tol: float = 1e-6
    max_iters: int = 2000

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.window_radius != 1:
            raise ValueError("only 3x3 windows (window_radius=1) are supported")
        if not 0 < self.solver_tol < 1e-2:
            raise ValueError("solver_tol must be in (0, 1e-2)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class MattingSystem:
    """Assembled Laplacian plus the known/unknown pixel partition."""

    laplacian: sp.csr_matrix
    height: int
    width: int
    known_idx: np.ndarray     # flat indices with trimap 0 or 1
    unknown_idx: np.ndarray   # flat indices with trimap 0.5
    known_values: np.ndarray  # constraint value per known index

    @property
    def n(self):
        return self.height * self.width


@dataclass(frozen=True)
class AlphaMatte:
    """Raw solve output; values may slightly leave [0, 1] on unknown pixels."""

    alpha: np.ndarray

    @property
    def height(self):
        return self.alpha.shape[0]

    @property
    def width(self):
        return self.alpha.shape[1]

    @property
    def alpha_clamped(self):
        return np.clip(self.alpha, 0.0, 1.0)


def build_matting_laplacian(gray, params=MattingParams(), active=None):
    """Assemble the sparse matting Laplacian of a single-channel image.

    Only 3x3 windows fully inside the image contribute; border pixels
    simply appear in fewer windows, which keeps every row sum at zero.

    ``active``, if given, is an (H, W) boolean mask restricting assembly to
    windows containing at least one active pixel. Rows and columns touching
    active pixels come out identical to the full assembly (bit for bit),
    which is what a constrained solve needs; rows fully outside are empty.

    Duplicate (i, j) contributions are merged with a stable sort and summed
    in window order, so L is exactly symmetric and rebuilds byte-identically.
    """
    img = check_float_raster(gray, name="gray", channels=(1,))
    h, w = img.shape
    if h < 3 or w < 3:
        raise ImageTooSmall(f"matting needs at least 3x3 pixels, got {h}x{w}")
    n = h * w

    idx = np.arange(n, dtype=np.int64).reshape(h, w)
    win_idx = sliding_window_view(idx, (3, 3)).reshape(-1, WINDOW_AREA)
    win_val = sliding_window_view(img, (3, 3)).reshape(-1, WINDOW_AREA)
    if active is not None:
        active = np.asarray(active, dtype=bool)
        if active.shape != (h, w):
            raise DimensionMismatch(f"active {active.shape} vs image {(h, w)}")
        keep = sliding_window_view(active, (3, 3)).reshape(-1, WINDOW_AREA).any(axis=1)
        win_idx = win_idx[keep]
        win_val = win_val[keep]

    if win_idx.shape[0] == 0:
        return sp.csr_matrix((n, n))

    mu = win_val.mean(axis=1)
    var = win_val.var(axis=1)
    dev = win_val - mu[:, None]
    denom = params.epsilon / WINDOW_AREA + var
    blocks = np.eye(WINDOW_AREA)[None, :, :] - (
        1.0 + dev[:, :, None] * dev[:, None, :] / denom[:, None, None]
    ) / WINDOW_AREA

    rows = np.repeat(win_idx, WINDOW_AREA, axis=1).ravel()
    cols = np.tile(win_idx, (1, WINDOW_AREA)).ravel()
    vals = blocks.ravel()

    # stable merge keeps duplicates in window order for both (i,j) and (j,i)
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    boundary = np.empty(rows.shape[0], dtype=bool)
    boundary[0] = True
    np.logical_or(rows[1:] != rows[:-1], cols[1:] != cols[:-1], out=boundary[1:])
    starts = np.flatnonzero(boundary)
    merged = np.add.reduceat(vals, starts)
    L = sp.csr_matrix((merged, (rows[starts], cols[starts])), shape=(n, n))
    return L


def partition_system(L, trimap):
    """Split pixels by trimap value into constraint and unknown sets."""
    tri = check_trimap(trimap)
    h, w = tri.shape
    if L.shape != (h * w, h * w):
        raise DimensionMismatch(f"L is {L.shape}, trimap has {h * w} pixels")
    flat = tri.ravel()
    known = np.flatnonzero(flat != 0.5)
    if known.size == 0:
        raise NoKnownPixels("trimap is entirely unknown (0.5)")
    unknown = np.flatnonzero(flat == 0.5)
    return MattingSystem(
        laplacian=sp.csr_matrix(L),
        height=h,
        width=w,
        known_idx=known,
        unknown_idx=unknown,
        known_values=flat[known].copy(),
    )


def _jacobi_pcg(A, b, tol, max_iters):
    """Conjugate gradients with diagonal preconditioning, fixed update order.

    Stops when the true residual satisfies ||b - A x|| <= tol * max(||b||,
    1e-30); the recurrence residual triggers the (cheap) check, the explicit
    one confirms it.
    """
    target = tol * max(np.linalg.norm(b), 1e-30)
    x = np.zeros_like(b)
    r = b.copy()
    if np.linalg.norm(r) <= target:
        return x
    minv = 1.0 / A.diagonal()
    z = minv * r
    p = z.copy()
    rz = r @ z
    for _ in range(max_iters):
        Ap = A @ p
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        if np.linalg.norm(r) <= target:
            r = b - A @ x
            if np.linalg.norm(r) <= target:
                return x
            z = minv * r
            p = z.copy()
            rz = r @ z
            continue
        z = minv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverDivergence(
        f"residual above {tol:g} after {max_iters} iterations"
    )


def solve_alpha(system, params=MattingParams()):
    """Solve for the alpha matte under the trimap constraints.

    Known pixels carry their constraint values verbatim; the unknown block
    solves L_UU alpha_U = -L_UK s to the configured relative residual.
    Small unknown blocks use a sparse LU factorization, large ones
    preconditioned CG; both are deterministic.
    """
    alpha = np.zeros(system.n)
    alpha[system.known_idx] = system.known_values
    if system.unknown_idx.size:
        L = system.laplacian
        rows = L[system.unknown_idx]
        L_uu = rows[:, system.unknown_idx].tocsc()
        rhs = -(rows[:, system.known_idx] @ system.known_values)
        if system.unknown_idx.size <= DIRECT_SOLVE_MAX_UNKNOWNS:
            x = spla.splu(L_uu).solve(rhs)
            resid = np.linalg.norm(L_uu @ x - rhs)
            if resid > params.solver_tol * max(np.linalg.norm(rhs), 1e-30):
                raise SolverDivergence("direct factorization residual too large")
        else:
            x = _jacobi_pcg(L_uu.tocsr(), rhs, params.solver_tol, params.max_iters)
        alpha[system.unknown_idx] = x
    return AlphaMatte(alpha=alpha.reshape(system.height, system.width))


def energy(L, alpha):
    """Quadratic form alpha^T L alpha of a candidate matte."""
    a = np.asarray(alpha, dtype=np.float64).ravel()
    if L.shape != (a.size, a.size):
        raise DimensionMismatch(f"L is {L.shape}, alpha has {a.size} entries")
    return float(a @ (L @ a))
