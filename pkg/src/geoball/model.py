"""Warping-function calculus and rotationally symmetric model-space geometry.

A model space is a warped product over [0, r_max) with a radial warping
function w satisfying w(0) = 0 and w'(0) = 1.  Everything downstream
(mean curvature of distance spheres, isoperimetric quotient, volumes,
balance condition) is a functional of w and the dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .quadrature import integrate

BALANCE_TOL = 1e-9


class DomainError(ValueError):
    """Radius outside the validity interval of a model space."""


class BalanceInconsistencyError(RuntimeError):
    """The three equivalent balance criteria disagree beyond tolerance."""


@dataclass(frozen=True)
class WarpingProfile:
    """Radial warping function with exact first and second derivatives.

    The evaluators are vectorized over numpy arrays.  r_max is the upper
    end of the domain (pi/sqrt(b) for positively curved space forms,
    +inf otherwise).
    """

    w: Callable[[np.ndarray], np.ndarray]
    dw: Callable[[np.ndarray], np.ndarray]
    ddw: Callable[[np.ndarray], np.ndarray]
    r_max: float
    label: str

    def __post_init__(self) -> None:
        eps = 1e-7
        w0 = float(self.w(np.array(eps)))
        dw0 = float(self.dw(np.array(eps)))
        if abs(w0 - eps) > 1e-6 * max(1.0, eps) or abs(dw0 - 1.0) > 1e-5:
            raise ValueError(
                f"warping '{self.label}' violates w(0)=0, w'(0)=1: "
                f"w({eps})={w0}, w'({eps})={dw0}"
            )
        probe_top = min(self.r_max * (1 - 1e-9), 20.0)
        rs = np.linspace(1e-6, probe_top, 257)
        if np.any(self.w(rs) <= 0):
            raise ValueError(f"warping '{self.label}' is not positive on (0, r_max)")


@dataclass(frozen=True)
class ModelSpace:
    """Warped-product model space of dimension n >= 2."""

    warping: WarpingProfile
    dim: int
    sphere_constant: float = field(init=False)

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dim}")
        n = self.dim
        c = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
        object.__setattr__(self, "sphere_constant", c)

    @property
    def r_max(self) -> float:
        return self.warping.r_max

    def _check_radius(self, r: float, allow_zero: bool = False) -> None:
        lo_ok = r >= 0 if allow_zero else r > 0
        if not lo_ok or r >= self.r_max:
            raise DomainError(
                f"radius {r} outside (0, {self.r_max}) for model '{self.warping.label}'"
            )


def euclidean_profile() -> WarpingProfile:
    return WarpingProfile(
        w=lambda r: np.asarray(r, dtype=float) + 0.0,
        dw=lambda r: np.ones_like(np.asarray(r, dtype=float)),
        ddw=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        r_max=math.inf,
        label="euclidean",
    )


def space_form_profile(b: float) -> WarpingProfile:
    """Constant-curvature warping: sin, identity or sinh branch."""
    if not math.isfinite(b):
        raise ValueError(f"curvature must be finite, got {b}")
    if b == 0:
        return euclidean_profile()
    if b > 0:
        sb = math.sqrt(b)
        return WarpingProfile(
            w=lambda r: np.sin(sb * np.asarray(r, dtype=float)) / sb,
            dw=lambda r: np.cos(sb * np.asarray(r, dtype=float)),
            ddw=lambda r: -sb * np.sin(sb * np.asarray(r, dtype=float)),
            r_max=math.pi / sb,
            label=f"sphere({b})",
        )
    sb = math.sqrt(-b)
    return WarpingProfile(
        w=lambda r: np.sinh(sb * np.asarray(r, dtype=float)) / sb,
        dw=lambda r: np.cosh(sb * np.asarray(r, dtype=float)),
        ddw=lambda r: sb * np.sinh(sb * np.asarray(r, dtype=float)),
        r_max=math.inf,
        label=f"hyperbolic({-b})",
    )


def polynomial_profile(coeffs: tuple[float, ...]) -> WarpingProfile:
    """Odd-polynomial warping w(r) = r + sum_j c_j r^(2j+1).

    The odd parity guarantees the model-space axioms at r = 0 by
    construction; positivity on the probe interval is audited at build time.
    """
    cs = tuple(float(c) for c in coeffs)

    def w(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        out = r.copy()
        for j, c in enumerate(cs, start=1):
            out = out + c * r ** (2 * j + 1)
        return out

    def dw(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        out = np.ones_like(r)
        for j, c in enumerate(cs, start=1):
            out = out + (2 * j + 1) * c * r ** (2 * j)
        return out

    def ddw(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for j, c in enumerate(cs, start=1):
            out = out + (2 * j + 1) * (2 * j) * c * r ** (2 * j - 1)
        return out

    label = "poly(" + ",".join(repr(c) for c in cs) + ")"
    return WarpingProfile(w=w, dw=dw, ddw=ddw, r_max=math.inf, label=label)


def make_space_form(b: float, n: int) -> ModelSpace:
    """Space form of constant sectional curvature b in dimension n."""
    return ModelSpace(warping=space_form_profile(b), dim=n)


def mean_curvature_model(m: ModelSpace, r: float) -> float:
    """Pointed-inward mean curvature of the distance sphere: w'(r)/w(r)."""
    m._check_radius(r)
    return float(m.warping.dw(np.array(r)) / m.warping.w(np.array(r)))


def radial_curvature_model(m: ModelSpace, r: float) -> float:
    """Radial sectional curvature -w''(r)/w(r); equals b for space forms."""
    m._check_radius(r)
    return float(-m.warping.ddw(np.array(r)) / m.warping.w(np.array(r)))


def sphere_volume_model(m: ModelSpace, r: float) -> float:
    """Volume of the distance sphere of radius r."""
    m._check_radius(r, allow_zero=True)
    return m.sphere_constant * float(m.warping.w(np.array(r))) ** (m.dim - 1)


def ball_volume_model(m: ModelSpace, r: float, rel_tol: float = 1e-11) -> float:
    """Volume of the geodesic ball of radius r, by quadrature of w^(n-1)."""
    m._check_radius(r, allow_zero=True)
    if r == 0:
        return 0.0
    n = m.dim
    val = integrate(lambda t: m.warping.w(t) ** (n - 1), 0.0, r, rel_tol=rel_tol)
    return m.sphere_constant * val


def isoperimetric_quotient(m: ModelSpace, r: float) -> float:
    """q(r) = Vol(ball_r) / Vol(sphere_r) = int_0^r w^(n-1) / w^(n-1)(r)."""
    m._check_radius(r)
    n = m.dim
    num = integrate(lambda t: m.warping.w(t) ** (n - 1), 0.0, r, rel_tol=1e-11)
    return num / float(m.warping.w(np.array(r))) ** (n - 1)


def _quotient_on_samples(m: ModelSpace, rs: np.ndarray) -> np.ndarray:
    """Vectorized q(r) on a sorted sample via a fine cumulative grid."""
    from .quadrature import cumulative_integral

    n = m.dim
    top = float(rs[-1])
    grid_n = max(4097, 2 * len(rs) + 1)
    grid = np.linspace(0.0, top, grid_n)
    wn = m.warping.w(grid) ** (n - 1)
    cum = cumulative_integral(wn, grid[1] - grid[0])
    num = np.interp(rs, grid, cum)
    return num / m.warping.w(rs) ** (n - 1)


@dataclass(frozen=True)
class BalanceReport:
    balanced: bool
    min_margin: float
    argmin: float
    quotient_derivative_min: float
    closed_form_min: float
    note: str


def balance_check(m: ModelSpace, R: float, samples: int = 512) -> BalanceReport:
    """Check the balanced-from-above condition q*eta <= 1/(n-1) on (0, R].

    Three equivalent criteria are evaluated on the same radius sample:
    the quotient-times-curvature margin, nonnegativity of q' (by finite
    differences), and the closed-form inequality
    w^n >= (n-1) w' * int_0^r w^(n-1).  Disagreement between the verdicts
    raises BalanceInconsistencyError.
    """
    m._check_radius(R)
    if samples < 2:
        raise ValueError("samples must be >= 2")
    n = m.dim
    rs = np.linspace(R / samples, R, samples)
    q = _quotient_on_samples(m, rs)
    eta = m.warping.dw(rs) / m.warping.w(rs)

    margin1 = 1.0 / (n - 1) - q * eta

    # q' = 1 - (n-1)*eta*q analytically; cross-checked by central differences.
    h = min(R * 1e-5, 1e-5)
    inner = rs[(rs - h > 0) & (rs + h < m.r_max)]
    qp_fd = (_quotient_on_samples(m, inner + h) - _quotient_on_samples(m, inner - h)) / (
        2 * h
    )
    margin2 = qp_fd

    wn = m.warping.w(rs) ** n
    cum = q * m.warping.w(rs) ** (n - 1)  # int_0^r w^(n-1)
    margin3 = (wn - (n - 1) * m.warping.dw(rs) * cum) / wn

    b1 = bool(margin1.min() >= -BALANCE_TOL)
    b2 = bool(margin2.min() >= -BALANCE_TOL * 10)  # FD noise allowance
    b3 = bool(margin3.min() >= -BALANCE_TOL)
    if not (b1 == b2 == b3):
        raise BalanceInconsistencyError(
            f"balance criteria disagree: quotient={b1}, derivative={b2}, "
            f"closed-form={b3} for model '{m.warping.label}' on (0, {R}]"
        )
    i = int(np.argmin(margin1))
    return BalanceReport(
        balanced=b1,
        min_margin=float(margin1[i]),
        argmin=float(rs[i]),
        quotient_derivative_min=float(margin2.min()),
        closed_form_min=float(margin3.min()),
        note=f"checked on (0, {R}] with {samples} samples; "
        "the global (all r >= 0) variant is not certified",
    )


def ball_radius_from_volume(m: ModelSpace, V: float, tol: float = 1e-12) -> float:
    """Invert the strictly increasing ball-volume map."""
    if V < 0:
        raise DomainError(f"volume must be nonnegative, got {V}")
    if V == 0:
        return 0.0
    if math.isfinite(m.r_max):
        hi = m.r_max * (1 - 1e-12)
        if V > ball_volume_model(m, hi) * (1 + 1e-12):
            raise DomainError(f"volume {V} exceeds total model volume")
    else:
        hi = 1.0
        while ball_volume_model(m, hi) < V:
            hi *= 2.0
            if hi > 1e6:
                raise DomainError(f"volume {V} not reachable below radius 1e6")
    return float(
        brentq(lambda r: ball_volume_model(m, r) - V, 0.0, hi, xtol=tol, rtol=8.9e-16)
    )
