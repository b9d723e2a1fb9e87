"""Finite-difference Poisson hierarchy, moments and eigenvalue on polar disks.

The Laplacian is discretized in divergence form, which makes the operator
symmetric in the area-weighted inner product; the expanded coordinate form
is kept as an audit route.  A single sparse factorization is reused across
all hierarchy levels and the inverse power iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import splu

from .hierarchy import EigenvalueEstimate, MomentSpectrum, lambda1_from_moments
from .surface import PolarMetric2D

TWO_PI = 2.0 * math.pi


class ResolutionError(RuntimeError):
    """Grid routes disagree beyond the allowed discretization budget."""


@dataclass(frozen=True)
class PolarGrid:
    """Uniform polar grid over the disk of radius R with cell-area weights."""

    metric: PolarMetric2D
    R: float
    n_r: int
    n_theta: int
    radii: np.ndarray = field(init=False, repr=False)
    thetas: np.ndarray = field(init=False, repr=False)
    node_area: np.ndarray = field(init=False, repr=False)  # rings 1..n_r-1
    boundary_area: np.ndarray = field(init=False, repr=False)
    center_area: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n_theta % 2 != 0:
            raise ValueError("n_theta must be even")
        if self.n_r < 4:
            raise ValueError("n_r must be >= 4")
        self.metric._check_radius(self.R)
        radii = np.linspace(0.0, self.R, self.n_r + 1)
        thetas = np.arange(self.n_theta) * (TWO_PI / self.n_theta)
        dr, dt = radii[1], thetas[1] if self.n_theta > 1 else TWO_PI
        rr, tt = np.meshgrid(radii[1:-1], thetas, indexing="ij")
        w = self.metric.w(rr, tt)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "node_area", w * dr * dt)
        wb = self.metric.w(np.full(self.n_theta, self.R), thetas)
        object.__setattr__(self, "boundary_area", wb * (dr / 2) * dt)
        wc = self.metric.w(np.full(self.n_theta, dr / 2), thetas)
        object.__setattr__(self, "center_area", float(np.sum(wc) * dr / 4 * dt))

    @property
    def dr(self) -> float:
        return float(self.radii[1])

    @property
    def dtheta(self) -> float:
        return TWO_PI / self.n_theta

    def total_area(self) -> float:
        return float(self.node_area.sum() + self.boundary_area.sum() + self.center_area)


@dataclass(frozen=True)
class GridField:
    """Values on the ring nodes (rings[i-1] is the ring at radius i*dr)
    plus one center value; theta is periodic with no seam column."""

    grid: PolarGrid
    center: float
    rings: np.ndarray  # shape (n_r, n_theta); last row is the r = R ring

    def __post_init__(self) -> None:
        expected = (self.grid.n_r, self.grid.n_theta)
        if self.rings.shape != expected:
            raise ValueError(f"rings shape {self.rings.shape} != {expected}")

    def integral(self) -> float:
        """Area-weighted sum over the disk (boundary ring included)."""
        g = self.grid
        return float(
            np.sum(self.rings[:-1] * g.node_area)
            + np.sum(self.rings[-1] * g.boundary_area)
            + self.center * g.center_area
        )

    def max_abs(self) -> float:
        return max(abs(self.center), float(np.max(np.abs(self.rings))))


def make_grid(m: PolarMetric2D, R: float, n_r: int = 128, n_theta: int = 128) -> PolarGrid:
    return PolarGrid(metric=m, R=R, n_r=n_r, n_theta=n_theta)


def field_from_function(grid: PolarGrid, fn) -> GridField:
    """Sample fn(r, theta) on the grid (fn must accept arrays)."""
    rr, tt = np.meshgrid(grid.radii[1:], grid.thetas, indexing="ij")
    return GridField(grid=grid, center=float(fn(0.0, 0.0)), rings=np.asarray(fn(rr, tt)))


def _face_weights(grid: PolarGrid):
    """Metric factor at radial faces (i+1/2) and angular faces (j+1/2)."""
    m, radii, thetas = grid.metric, grid.radii, grid.thetas
    r_half = radii[:-1] + grid.dr / 2  # faces 1/2 .. n_r-1/2
    rr, tt = np.meshgrid(r_half, thetas, indexing="ij")
    w_face_r = m.w(rr, tt)  # (n_r, n_theta)
    rr2, tt2 = np.meshgrid(radii[1:-1], thetas + grid.dtheta / 2, indexing="ij")
    w_face_t = m.w(rr2, tt2)  # (n_r-1, n_theta)
    return w_face_r, w_face_t


def apply_laplacian(
    m: PolarMetric2D, grid: PolarGrid, f: GridField, form: str = "divergence"
) -> GridField:
    """Discrete Laplacian of f; the boundary ring of the result is zeroed.

    'divergence' is the flux-balanced second-order scheme used by the
    solver; 'expanded' discretizes the coordinate form
    f_rr + (w_r/w) f_r + f_tt/w^2 - (w_t/w^3) f_t and exists as an audit.
    """
    if m is not grid.metric:
        raise ValueError("field grid was built for a different metric")
    dr, dt = grid.dr, grid.dtheta
    radii, thetas = grid.radii, grid.thetas
    nr, ntheta = grid.n_r, grid.n_theta
    vals = f.rings  # (n_r, n_theta)
    rr, tt = np.meshgrid(radii[1:-1], thetas, indexing="ij")
    w = m.w(rr, tt)
    # rows 0..n_r-2 of `out` are interior rings 1..n_r-1
    below = np.vstack([np.full((1, ntheta), f.center), vals[:-2]])
    above = vals[1:]
    here = vals[:-1]
    if form == "divergence":
        w_face_r, w_face_t = _face_weights(grid)
        flux_r = (
            w_face_r[1:] * (above - here) - w_face_r[:-1] * (here - below)
        ) / dr**2
        inv_face = 1.0 / w_face_t
        d_plus = np.roll(here, -1, axis=1) - here
        d_minus = here - np.roll(here, 1, axis=1)
        flux_t = (inv_face * d_plus - np.roll(inv_face, 1, axis=1) * d_minus) / dt**2
        interior = (flux_r + flux_t) / w
        center = float(
            np.sum(w_face_r[0] * (vals[0] - f.center)) * dt / dr / grid.center_area
        )
    elif form == "expanded":
        f_r = (above - below) / (2 * dr)
        f_rr = (above - 2 * here + below) / dr**2
        f_t = (np.roll(here, -1, axis=1) - np.roll(here, 1, axis=1)) / (2 * dt)
        f_tt = (np.roll(here, -1, axis=1) - 2 * here + np.roll(here, 1, axis=1)) / dt**2
        interior = (
            f_rr
            + m.w_r(rr, tt) / w * f_r
            + f_tt / w**2
            - m.w_t(rr, tt) / w**3 * f_t
        )
        w_face_r, _ = _face_weights(grid)
        center = float(
            np.sum(w_face_r[0] * (vals[0] - f.center)) * dt / dr / grid.center_area
        )
    else:
        raise ValueError(f"unknown form '{form}'")
    rings = np.vstack([interior, np.zeros((1, ntheta))])
    return GridField(grid=grid, center=center, rings=rings)


class HierarchySolver:
    """Sparse direct solver for the Dirichlet Poisson hierarchy on a grid.

    Unknowns: one center node plus rings 1..n_r-1 (the r = R ring is the
    Dirichlet boundary).  The flux matrix A is symmetric; the Laplacian is
    diag(1/area) @ A.
    """

    def __init__(self, grid: PolarGrid):
        self.grid = grid
        nr, nt = grid.n_r, grid.n_theta
        dr, dt = grid.dr, grid.dtheta
        n_unknowns = 1 + (nr - 1) * nt
        w_face_r, w_face_t = _face_weights(grid)

        def idx(i: int, j: int) -> int:
            return 1 + (i - 1) * nt + (j % nt)

        rows, cols, data = [], [], []

        def add(p: int, q: int, c: float) -> None:
            rows.append(p)
            cols.append(q)
            data.append(c)

        # center <-> first ring
        for j in range(nt):
            c = w_face_r[0, j] * dt / dr
            p, q = 0, idx(1, j)
            add(p, p, -c)
            add(q, q, -c)
            add(p, q, c)
            add(q, p, c)
        # radial faces between rings i and i+1
        for i in range(1, nr - 1):
            for j in range(nt):
                c = w_face_r[i, j] * dt / dr
                p = idx(i, j)
                if i + 1 <= nr - 1:
                    q = idx(i + 1, j)
                    add(p, p, -c)
                    add(q, q, -c)
                    add(p, q, c)
                    add(q, p, c)
        # last interior ring to the Dirichlet boundary (value 0)
        for j in range(nt):
            c = w_face_r[nr - 1, j] * dt / dr
            p = idx(nr - 1, j)
            add(p, p, -c)
        # angular faces
        for i in range(1, nr):
            for j in range(nt):
                c = dr / (w_face_t[i - 1, j] * dt)
                p, q = idx(i, j), idx(i, j + 1)
                add(p, p, -c)
                add(q, q, -c)
                add(p, q, c)
                add(q, p, c)

        self.flux = csc_matrix(
            (data, (rows, cols)), shape=(n_unknowns, n_unknowns)
        )
        areas = np.empty(n_unknowns)
        areas[0] = grid.center_area
        areas[1:] = grid.node_area.reshape(-1)
        self.areas = areas
        self._flux_norm = float(np.max(np.abs(self.flux).sum(axis=1)))
        self._lu = splu(self.flux)

    def _vec_to_field(self, x: np.ndarray) -> GridField:
        nr, nt = self.grid.n_r, self.grid.n_theta
        rings = np.vstack([x[1:].reshape(nr - 1, nt), np.zeros((1, nt))])
        return GridField(grid=self.grid, center=float(x[0]), rings=rings)

    def _field_to_vec(self, f: GridField) -> np.ndarray:
        return np.concatenate([[f.center], f.rings[:-1].reshape(-1)])

    def solve_poisson(self, rhs: np.ndarray) -> np.ndarray:
        """Solve L v = rhs with one step of iterative refinement."""
        b = self.areas * rhs
        x = self._lu.solve(b)
        x += self._lu.solve(b - self.flux @ x)
        return x

    def hierarchy(self, k_max: int, residual_tol: float = 1e-10) -> list[GridField]:
        if k_max < 1:
            raise ValueError("k_max must be >= 1")
        levels = []
        v = np.ones(len(self.areas))
        for _ in range(k_max):
            v_next = self.solve_poisson(-v)
            # normwise backward error of the linear system; dividing
            # elementwise by the near-pole cell areas would only amplify
            # bare float64 roundoff
            rhs = self.areas * v
            res = np.max(np.abs(self.flux @ v_next + rhs)) / (
                self._flux_norm * np.max(np.abs(v_next)) + np.max(np.abs(rhs))
            )
            if res > residual_tol:
                raise ResolutionError(f"Poisson solve residual {res} too large")
            levels.append(self._vec_to_field(v_next))
            v = v_next
        return levels

    def smallest_eigenvalue(
        self, tol: float = 1e-8, max_iter: int = 500
    ) -> float:
        """Smallest Dirichlet eigenvalue by inverse power iteration on the
        area-weighted pencil (-flux, areas)."""
        rng = np.random.default_rng(7)
        x = rng.standard_normal(len(self.areas))
        lam_prev = 0.0
        for _ in range(max_iter):
            y = self._lu.solve(self.areas * x)
            y /= np.linalg.norm(y)
            lam = -float(y @ (self.flux @ y)) / float(y @ (self.areas * y))
            if abs(lam - lam_prev) <= tol * abs(lam):
                return lam
            lam_prev, x = lam, y
        raise ResolutionError("inverse power iteration did not converge")


def solve_hierarchy_grid(
    m: PolarMetric2D, grid: PolarGrid, k_max: int
) -> list[GridField]:
    """Normalized hierarchy v_k = u_k/k!, k = 1..k_max, by direct sparse solves."""
    if m is not grid.metric:
        raise ValueError("grid was built for a different metric")
    if k_max > 64:
        import warnings

        warnings.warn("k_max > 64: deep hierarchy may lose accuracy", RuntimeWarning)
    return HierarchySolver(grid).hierarchy(k_max)


def moments_grid(grid: PolarGrid, fields: list[GridField]) -> MomentSpectrum:
    """Normalized moments from hierarchy grid fields; index 0 is the disk area."""
    moments = np.empty(len(fields) + 1)
    moments[0] = grid.total_area()
    for k, f in enumerate(fields, start=1):
        moments[k] = f.integral()
    return MomentSpectrum(normalized=moments, radius=grid.R, dim=2)


@dataclass(frozen=True)
class GridEigenvalue:
    moment_value: float
    power_value: float
    moment_estimate: EigenvalueEstimate


def lambda1_grid(
    m: PolarMetric2D,
    grid: PolarGrid,
    k_max: int = 24,
    agreement_tol: float = 0.05,
) -> GridEigenvalue:
    """First Dirichlet eigenvalue two ways: moment-ratio limit and inverse
    power iteration.  Disagreement beyond agreement_tol raises."""
    solver = HierarchySolver(grid)
    fields = solver.hierarchy(k_max)
    est = lambda1_from_moments(moments_grid(grid, fields))
    power = solver.smallest_eigenvalue()
    if abs(est.value - power) > agreement_tol * power:
        raise ResolutionError(
            f"eigenvalue routes disagree: moments={est.value}, power={power}"
        )
    return GridEigenvalue(moment_value=est.value, power_value=power, moment_estimate=est)
