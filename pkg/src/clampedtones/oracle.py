"""Finite-volume discretisation of the radial clamped plate and membrane problems.

This is an independent check on the hypergeometric machinery: it never calls
into specfun or tones.  Nodes sit at rho_i = i h, each owns the control volume
[rho_i - h/2, rho_i + h/2] clipped to [0, L], and fluxes use the measure weight
s_kappa^(n-1) at cell faces.  The discrete Laplacian D therefore satisfies
v . M D v = -(discrete Dirichlet energy), and the plate operator D^T V D is
symmetric positive definite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .errors import DomainError, SolverError
from .geometry import SpaceForm

RQ_TOL = 1e-10
MAX_ITER = 10_000


def _s_kappa(sf: SpaceForm, rho):
    rho = np.asarray(rho, dtype=float)
    if sf.kappa == 0:
        return rho
    return np.sinh(sf.kappa * rho) / sf.kappa


def _antiderivative(sf: SpaceForm, rho):
    """int_0^rho s_kappa^(n-1)."""
    rho = np.asarray(rho, dtype=float)
    n, k = sf.n, sf.kappa
    if k == 0:
        return rho ** n / n
    x = k * rho
    if n == 2:
        return 2.0 * np.sinh(0.5 * x) ** 2 / k ** 2
    if n == 3:
        return (np.sinh(2 * x) / 4 - x / 2) / k ** 3
    raise DomainError("curved finite-volume grids are implemented for n = 2, 3 only")


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid on [0, L] with n_points cells."""

    n_points: int
    radius: float
    weight: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def uniform(cls, sf: SpaceForm, radius: float, n_points: int) -> "RadialGrid":
        if n_points < 16:
            raise DomainError("need at least 16 grid points")
        if not radius > 0:
            raise DomainError("radius must be positive")
        rho = np.arange(n_points + 1) * (radius / n_points)
        return cls(n_points, radius, _s_kappa(sf, rho) ** (sf.n - 1))

    @property
    def spacing(self) -> float:
        return self.radius / self.n_points

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_points + 1) * self.spacing


def _cells(sf: SpaceForm, grid: RadialGrid):
    N, h = grid.n_points, grid.spacing
    faces = (np.arange(N) + 0.5) * h
    face_w = _s_kappa(sf, faces) ** (sf.n - 1)
    edges = np.concatenate([[0.0], faces, [grid.radius]])
    P = _antiderivative(sf, edges)
    vol = np.diff(P)  # N + 1 control volumes, node N owns a half cell
    return face_w, vol


def _laplacian_matrix(sf: SpaceForm, grid: RadialGrid):
    """Dense (N+1) x N matrix of the discrete Laplacian at nodes 0..N acting on v_0..v_{N-1}.

    v_N = 0 is imposed and the flux through rho = L vanishes (v'(L) = 0).
    """
    N, h = grid.n_points, grid.spacing
    face_w, vol = _cells(sf, grid)
    D = np.zeros((N + 1, N))
    for i in range(N + 1):
        if i < N:  # face i + 1/2
            f = face_w[i] / h
            D[i, i] -= f
            if i + 1 < N:
                D[i, i + 1] += f
        if i > 0:  # face i - 1/2
            f = face_w[i - 1] / h
            D[i, i - 1] += f
            if i < N:
                D[i, i] -= f
        D[i] /= vol[i]
    return D, vol


def _to_banded_upper(A: np.ndarray, bw: int) -> np.ndarray:
    N = A.shape[0]
    ab = np.zeros((bw + 1, N))
    for d in range(bw + 1):
        ab[bw - d, d:] = np.diagonal(A, d)
    return ab


def _smallest_eigenvalue(B: np.ndarray, bw: int) -> float:
    """Smallest eigenvalue of a symmetric positive definite banded matrix by inverse iteration."""
    chol = cholesky_banded(_to_banded_upper(B, bw))
    y = np.ones(B.shape[0])
    y /= np.linalg.norm(y)
    rq_old = math.inf
    for _ in range(MAX_ITER):
        z = cho_solve_banded((chol, False), y)
        # Rayleigh quotient of the inverse: y.B y loses digits to the large
        # high-frequency eigenvalues, 1 / (y . B^-1 y) does not
        rq = 1.0 / float(y @ z)
        y = z / np.linalg.norm(z)
        if abs(rq - rq_old) <= RQ_TOL * abs(rq):
            return rq
        rq_old = rq
    raise SolverError("inverse iteration did not converge")


def _check(sf: SpaceForm, L: float, grid: RadialGrid):
    if sf.kappa > 0 and sf.n not in (2, 3):
        raise DomainError("finite-volume oracle supports n = 2, 3 for kappa > 0")
    if not math.isclose(grid.radius, L, rel_tol=1e-12):
        raise DomainError("grid radius does not match L")


def fd_plate_tone(sf: SpaceForm, L: float, grid: RadialGrid) -> float:
    """Smallest clamped-plate eigenvalue: minimum of sum V (Dv)^2 / sum V v^2."""
    _check(sf, L, grid)
    D, vol = _laplacian_matrix(sf, grid)
    A = D.T @ (vol[:, None] * D)
    scale = 1.0 / np.sqrt(vol[:-1])
    B = scale[:, None] * A * scale[None, :]
    return _smallest_eigenvalue(B, 2)


def fd_membrane_tone(sf: SpaceForm, L: float, grid: RadialGrid) -> float:
    """Smallest Dirichlet eigenvalue of -Laplacian on radial functions."""
    _check(sf, L, grid)
    D, vol = _laplacian_matrix(sf, grid)
    S = -(vol[:-1, None] * D[:-1])  # stiffness, symmetric tridiagonal
    S = 0.5 * (S + S.T)
    scale = 1.0 / np.sqrt(vol[:-1])
    B = scale[:, None] * S * scale[None, :]
    return _smallest_eigenvalue(B, 1)
