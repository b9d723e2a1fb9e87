"""Geometry of 2-D polar metrics g = dr^2 + w^2(r, theta) dtheta^2.

Metrics carry analytic partial derivatives; a construction-time
finite-difference audit rejects inconsistent evaluators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import DomainError, ModelSpace, WarpingProfile
from .quadrature import integrate

TWO_PI = 2.0 * math.pi


class MetricAuditError(ValueError):
    """Analytic partials disagree with finite differences at build time."""


@dataclass(frozen=True)
class PolarMetric2D:
    """Metric evaluator w(r, theta) with partials w_r, w_rr, w_theta.

    All evaluators are vectorized and broadcast over (r, theta) arrays.
    R_valid bounds the radii on which the polar chart is declared valid.
    """

    w: Callable[[np.ndarray, np.ndarray], np.ndarray]
    w_r: Callable[[np.ndarray, np.ndarray], np.ndarray]
    w_rr: Callable[[np.ndarray, np.ndarray], np.ndarray]
    w_t: Callable[[np.ndarray, np.ndarray], np.ndarray]
    R_valid: float
    label: str

    def __post_init__(self) -> None:
        _audit_partials(self)
        _audit_pole_and_periodicity(self)

    def _check_radius(self, t: float) -> None:
        if not 0 < t <= self.R_valid:
            raise DomainError(
                f"radius {t} outside (0, {self.R_valid}] for metric '{self.label}'"
            )


def _audit_partials(m: PolarMetric2D, n_points: int = 200, tol: float = 1e-5) -> None:
    rng = np.random.default_rng(20240811)
    top = min(m.R_valid, 5.0)
    rs = rng.uniform(0.05 * top, 0.95 * top, n_points)
    ts = rng.uniform(0.0, TWO_PI, n_points)
    h = 1e-5
    wr_fd = (m.w(rs + h, ts) - m.w(rs - h, ts)) / (2 * h)
    wrr_fd = (m.w(rs + h, ts) - 2 * m.w(rs, ts) + m.w(rs - h, ts)) / h**2
    wt_fd = (m.w(rs, ts + h) - m.w(rs, ts - h)) / (2 * h)
    scale = np.maximum(1.0, np.abs(m.w(rs, ts)))
    for name, fd, an in (
        ("w_r", wr_fd, m.w_r(rs, ts)),
        ("w_rr", wrr_fd, m.w_rr(rs, ts)),
        ("w_t", wt_fd, m.w_t(rs, ts)),
    ):
        err = np.max(np.abs(fd - an) / scale)
        if err > tol:
            raise MetricAuditError(
                f"metric '{m.label}': analytic {name} deviates from finite "
                f"differences by {err:.3e}"
            )


def _audit_pole_and_periodicity(m: PolarMetric2D) -> None:
    ts = np.linspace(0.0, TWO_PI, 33)
    r0 = 1e-4
    ratio = m.w(np.full_like(ts, r0), ts) / r0
    if np.max(np.abs(ratio - 1.0)) > 1e-3:
        raise MetricAuditError(
            f"metric '{m.label}' fails the smooth-pole condition w(r,.)/r -> 1"
        )
    rs = np.linspace(0.1, min(m.R_valid, 5.0), 17)
    seam = np.abs(m.w(rs, np.zeros_like(rs)) - m.w(rs, np.full_like(rs, TWO_PI)))
    if np.max(seam) > 1e-12:
        raise MetricAuditError(f"metric '{m.label}' is not 2*pi-periodic in theta")
    probe_r = np.linspace(1e-3, min(m.R_valid, 5.0), 64)
    pr, pt = np.meshgrid(probe_r, np.linspace(0, TWO_PI, 64, endpoint=False))
    if np.any(m.w(pr, pt) <= 0):
        raise MetricAuditError(f"metric '{m.label}' is not positive inside R_valid")


def perturbed_flat_metric(eps: float, mode: int, R_valid: float = 10.0) -> PolarMetric2D:
    """Family w = r * (1 + eps*r^2 / (1 + r^2 cos^2(mode*theta))).

    With eps = 1, mode = 1 this is the built-in example metric whose sphere
    mean curvatures dominate the flat ones while its Gauss curvature
    changes sign.
    """
    eps = float(eps)
    mode = int(mode)
    if mode < 1:
        raise ValueError("mode must be a positive integer")

    def cs2(t):
        return np.cos(mode * np.asarray(t, dtype=float)) ** 2

    def w(r, t):
        r = np.asarray(r, dtype=float)
        d = 1.0 + r**2 * cs2(t)
        return r + eps * r**3 / d

    def w_r(r, t):
        r = np.asarray(r, dtype=float)
        c = cs2(t)
        d = 1.0 + r**2 * c
        return 1.0 + eps * (3 * r**2 + r**4 * c) / d**2

    def w_rr(r, t):
        r = np.asarray(r, dtype=float)
        c = cs2(t)
        d = 1.0 + r**2 * c
        return eps * 2 * r * (3.0 - r**2 * c) / d**3

    def w_t(r, t):
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float)
        d = 1.0 + r**2 * cs2(t)
        return eps * r**5 * mode * np.sin(2 * mode * t) / d**2

    label = "example1" if (eps == 1.0 and mode == 1) else f"perturbed({eps},{mode})"
    return PolarMetric2D(w=w, w_r=w_r, w_rr=w_rr, w_t=w_t, R_valid=R_valid, label=label)


def builtin_example_metric(R_valid: float = 10.0) -> PolarMetric2D:
    """The benchmark metric w(r, theta) = r*(1 + r^2/(1 + r^2 cos^2 theta))."""
    return perturbed_flat_metric(1.0, 1, R_valid=R_valid)


def radial_metric(profile: WarpingProfile, R_valid: float | None = None) -> PolarMetric2D:
    """Theta-independent wrapper turning a warping profile into a 2-D metric."""
    if R_valid is None:
        R_valid = min(profile.r_max * 0.999, 10.0)

    def w(r, t):
        return profile.w(np.asarray(r, dtype=float)) * np.ones_like(
            np.asarray(t, dtype=float)
        )

    def w_r(r, t):
        return profile.dw(np.asarray(r, dtype=float)) * np.ones_like(
            np.asarray(t, dtype=float)
        )

    def w_rr(r, t):
        return profile.ddw(np.asarray(r, dtype=float)) * np.ones_like(
            np.asarray(t, dtype=float)
        )

    def w_t(r, t):
        return np.zeros(np.broadcast(np.asarray(r), np.asarray(t)).shape)

    return PolarMetric2D(
        w=w, w_r=w_r, w_rr=w_rr, w_t=w_t, R_valid=R_valid, label=f"radial({profile.label})"
    )


METRIC_REGISTRY = {
    "example1": builtin_example_metric,
}


def sphere_mean_curvature(m: PolarMetric2D, t: float, theta: float) -> float:
    """Pointed-inward mean curvature of the distance circle: w_r / w."""
    m._check_radius(t)
    return float(m.w_r(np.array(t), np.array(theta)) / m.w(np.array(t), np.array(theta)))


def gauss_curvature(m: PolarMetric2D, t: float, theta: float) -> float:
    """Gauss curvature -w_rr / w."""
    m._check_radius(t)
    return float(
        -m.w_rr(np.array(t), np.array(theta)) / m.w(np.array(t), np.array(theta))
    )


def sphere_length(m: PolarMetric2D, r: float, rel_tol: float = 1e-10) -> float:
    """Length of the distance circle: int_0^{2pi} w(r, theta) dtheta."""
    m._check_radius(r)
    return integrate(lambda t: m.w(np.full_like(t, r), t), 0.0, TWO_PI, rel_tol=rel_tol)


def ball_area(m: PolarMetric2D, r: float, rel_tol: float = 1e-9) -> float:
    """Area of the geodesic disk: int_0^r length(t) dt (nested quadrature)."""
    m._check_radius(r)

    def lengths(ts: np.ndarray) -> np.ndarray:
        out = np.empty_like(ts)
        for i, t in enumerate(ts):
            out[i] = sphere_length(m, t, rel_tol=rel_tol * 0.1) if t > 0 else 0.0
        return out

    return integrate(lengths, 0.0, r, rel_tol=rel_tol, initial_points=129)


@dataclass(frozen=True)
class HypothesisReport:
    """Sign classification of H_metric(t, theta) - eta_model(t) over the ball."""

    direction: str  # "model<=M", "model>=M", "equal" or "mixed"
    min_margin: float
    max_margin: float
    argmin: tuple[float, float]
    tol: float

    @property
    def uniform(self) -> bool:
        return self.direction in ("model<=M", "model>=M", "equal")


def hypothesis_report(
    m: PolarMetric2D,
    model: ModelSpace,
    R: float,
    n_r: int = 256,
    n_theta: int = 256,
    tol: float = 1e-9,
) -> HypothesisReport:
    """Grid scan of the mean-curvature gap H_M - eta_model on (0, R] x [0, 2pi)."""
    if model.dim != 2:
        raise ValueError("hypothesis check requires a 2-D model space")
    m._check_radius(R)
    if R >= model.r_max:
        raise DomainError(f"radius {R} exceeds the model domain {model.r_max}")
    rs = np.linspace(R / n_r, R, n_r)
    ts = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
    rr, tt = np.meshgrid(rs, ts, indexing="ij")
    h_metric = m.w_r(rr, tt) / m.w(rr, tt)
    eta = (model.warping.dw(rs) / model.warping.w(rs))[:, None]
    gap = h_metric - eta
    gmin, gmax = float(gap.min()), float(gap.max())
    i, j = np.unravel_index(np.argmin(gap), gap.shape)
    if gmin >= -tol and gmax <= tol:
        direction = "equal"
    elif gmin >= -tol:
        direction = "model<=M"
    elif gmax <= tol:
        direction = "model>=M"
    else:
        direction = "mixed"
    return HypothesisReport(
        direction=direction,
        min_margin=gmin,
        max_margin=gmax,
        argmin=(float(rs[i]), float(ts[j])),
        tol=tol,
    )
