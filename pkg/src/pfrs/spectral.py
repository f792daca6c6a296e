"""Fast-diagonalization solves on the uniform staggered box.

The constant-coefficient operators this package relies on are exactly
diagonalized by sine/cosine transforms:

* a face-normal axis of a velocity component (wall faces pinned to zero)
  by the type-I sine transform over interior faces;
* a tangential axis (no-slip at the wall half a cell beyond the first sample,
  via the mirror ghost u_ghost = -u_first) by the type-II sine transform;
* the cell-centered pressure Laplacian with zero-flux walls by the type-II
  cosine transform.

These give O(n^d log n) exact solves that serve both as direct solvers for
constant coefficients and as preconditioners for penalized operators.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dct, dst, idct


def sine_eigenvalues(n_cells: int, kind: int) -> np.ndarray:
    """1D eigenvalues of the (unit-spacing) second-difference operator.

    kind=1: interior faces of an n_cells axis (n_cells - 1 modes).
    kind=2: cell-offset samples with mirror walls (n_cells modes).
    """
    if kind == 1:
        m = np.arange(1, n_cells)
    else:
        m = np.arange(1, n_cells + 1)
    return 2.0 - 2.0 * np.cos(np.pi * m / n_cells)


def cosine_eigenvalues(n_cells: int) -> np.ndarray:
    m = np.arange(n_cells)
    return 2.0 - 2.0 * np.cos(np.pi * m / n_cells)


def solve_shifted_laplace_component(b: np.ndarray, axis: int, h: float,
                                    shift: float) -> np.ndarray:
    """Solve (shift - Laplacian) u = b for one velocity component.

    `axis` is the component's face-normal direction.  b must vanish on the
    wall-normal faces; the result does too.
    """
    dim = b.ndim
    nfull = b.shape[axis]
    sl = [slice(None)] * dim
    sl[axis] = slice(1, nfull - 1)
    x = b[tuple(sl)]

    lam_total = np.zeros(x.shape)
    for ax in range(dim):
        ncells = x.shape[ax] + 1 if ax == axis else x.shape[ax]
        lam = sine_eigenvalues(ncells, 1 if ax == axis else 2) / (h * h)
        shape = [1] * dim
        shape[ax] = lam.size
        lam_total = lam_total + lam.reshape(shape)

    for ax in range(dim):
        x = dst(x, type=1 if ax == axis else 2, axis=ax, norm="ortho", workers=-1)
    x = x / (shift + lam_total)
    for ax in range(dim):
        x = dst(x, type=1 if ax == axis else 3, axis=ax, norm="ortho", workers=-1)

    out = np.zeros_like(b)
    out[tuple(sl)] = x
    return out


def solve_neumann_poisson(rhs: np.ndarray, h: float) -> np.ndarray:
    """Solve the compatible cell-centered Poisson problem L p = rhs with
    zero-flux walls; the constant mode is pinned to zero.

    L is the divergence of the staggered gradient, i.e. the standard
    7/5-point cell Laplacian with one-sided boundary rows (negative
    semidefinite); rhs is expected to be mean-free up to rounding.
    """
    dim = rhs.ndim
    x = rhs.copy()
    lam_total = np.zeros(x.shape)
    for ax in range(dim):
        lam = cosine_eigenvalues(x.shape[ax]) / (h * h)
        shape = [1] * dim
        shape[ax] = lam.size
        lam_total = lam_total + lam.reshape(shape)
    for ax in range(dim):
        x = dct(x, type=2, axis=ax, norm="ortho", workers=-1)
    lam_total.flat[0] = 1.0  # nullspace: constants
    x = x / (-lam_total)
    x.flat[0] = 0.0
    for ax in range(dim):
        x = idct(x, type=2, axis=ax, norm="ortho", workers=-1)
    return x
