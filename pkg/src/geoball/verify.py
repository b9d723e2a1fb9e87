"""Comparison-theorem harness.

Runs the full pipeline on a (metric, model space, radius) triple and
records a signed margin for every inequality: exit-time transplant
domination, isoperimetric quotients and volumes, moment spectrum,
torsional rigidity of the symmetrized ball, and the first Dirichlet
eigenvalue.  Margins are normalized and a pass flag is margin >= -tol.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .hierarchy import (
    hierarchy_sequence,
    lambda1_shooting,
    mean_exit_profile,
    moment_spectrum,
    sphere_volume_model,
)
from .model import ModelSpace, balance_check, ball_radius_from_volume
from .pde import PolarGrid, lambda1_grid, moments_grid, solve_hierarchy_grid
from .surface import PolarMetric2D, ball_area, hypothesis_report, sphere_length
from .symmetrize import ComparisonPreconditionError, transplant_exit_time

INEQ_TOL = 1e-6
EQUALITY_TOL = 1e-3


@dataclass(frozen=True)
class Entry:
    name: str
    inequality: str
    lhs: float
    rhs: float
    margin: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    metric: str
    model: str
    radius: float
    direction: str
    hypothesis_min_margin: float
    entries: tuple[Entry, ...]
    grid: tuple[int, int]
    tol: float = INEQ_TOL

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "hypothesis": {
                "metric": self.metric,
                "model": self.model,
                "radius": self.radius,
                "direction": self.direction,
                "min_margin": self.hypothesis_min_margin,
            },
            "entries": [asdict(e) for e in self.entries],
            "provenance": {
                "grid": list(self.grid),
                "tolerance": self.tol,
            },
        }


def _sign(direction: str) -> float:
    """+1 when model curvatures sit below the metric's, -1 when above."""
    if direction in ("model<=M", "equal"):
        return 1.0
    if direction == "model>=M":
        return -1.0
    raise ComparisonPreconditionError(
        "mean-curvature comparison has no uniform direction"
    )


def _tol_for(direction: str) -> float:
    """Equality cases are grid-limited and get the looser threshold."""
    return EQUALITY_TOL if direction == "equal" else INEQ_TOL


def _entry(name: str, inequality: str, lhs: float, rhs: float, sign: float,
           scale: float = 1.0, tol: float = INEQ_TOL) -> Entry:
    """Signed margin sign*(lhs - rhs) normalized by scale."""
    margin = sign * (lhs - rhs) / max(abs(scale), 1e-300)
    return Entry(
        name=name,
        inequality=inequality,
        lhs=lhs,
        rhs=rhs,
        margin=float(margin),
        passed=bool(margin >= -tol),
    )


def _require_uniform(m: PolarMetric2D, model: ModelSpace, R: float):
    hyp = hypothesis_report(m, model, R)
    if not hyp.uniform:
        raise ComparisonPreconditionError(
            "mean-curvature comparison has no uniform direction"
        )
    return hyp


def verify_mean_exit(
    m: PolarMetric2D,
    model: ModelSpace,
    R: float,
    n_r: int = 128,
    n_theta: int = 128,
    sign: float | None = None,
) -> Entry:
    """Transplanted model exit time dominates the metric exit time (per
    the hypothesis direction), checked pointwise on the grid."""
    hyp = _require_uniform(m, model, R)
    s = _sign(hyp.direction) if sign is None else sign
    grid = PolarGrid(metric=m, R=R, n_r=n_r, n_theta=n_theta)
    transplant = transplant_exit_time(model, R, grid)
    v1 = solve_hierarchy_grid(m, grid, 1)[0]
    gap = s * (transplant.rings[:-1] - v1.rings[:-1])
    gap_center = s * (transplant.center - v1.center)
    scale = transplant.max_abs()
    worst = min(float(gap.min()), gap_center)
    return _entry(
        "mean_exit_transplant",
        "transplant >= exit_time" if s > 0 else "transplant <= exit_time",
        worst,
        0.0,
        1.0,
        scale=scale,
        tol=_tol_for(hyp.direction),
    )


def verify_isoperimetric_volumes(
    m: PolarMetric2D,
    model: ModelSpace,
    R: float,
    r_samples: tuple[float, ...] = (0.25, 0.5, 1.0),
    sign: float | None = None,
) -> list[Entry]:
    """Isoperimetric quotient and volume comparisons at sampled radii."""
    hyp = _require_uniform(m, model, R)
    s = _sign(hyp.direction) if sign is None else sign
    tol = _tol_for(hyp.direction)
    from .model import isoperimetric_quotient

    entries = []
    for r in r_samples:
        r = float(r)
        if r > R:
            continue
        q_model = isoperimetric_quotient(model, r)
        length = sphere_length(m, r)
        area = ball_area(m, r)
        q_metric = area / length
        entries.append(
            _entry(
                f"isoperimetric_quotient(r={r})",
                "q_model >= q_metric" if s > 0 else "q_model <= q_metric",
                q_model,
                q_metric,
                s,
                scale=q_model,
                tol=tol,
            )
        )
        vol_ball_model = _ball_volume(model, r)
        vol_sphere_model = sphere_volume_model(model, r)
        entries.append(
            _entry(
                f"ball_volume(r={r})",
                "Vol(B_model) <= Vol(B_metric)" if s > 0 else
                "Vol(B_model) >= Vol(B_metric)",
                area,
                vol_ball_model,
                s,
                scale=vol_ball_model,
                tol=tol,
            )
        )
        entries.append(
            _entry(
                f"sphere_volume(r={r})",
                "Vol(S_model) <= Vol(S_metric)" if s > 0 else
                "Vol(S_model) >= Vol(S_metric)",
                length,
                vol_sphere_model,
                s,
                scale=vol_sphere_model,
                tol=tol,
            )
        )
    return entries


def _ball_volume(model: ModelSpace, r: float) -> float:
    from .model import ball_volume_model

    return ball_volume_model(model, r)


def verify_moment_spectrum(
    m: PolarMetric2D,
    model: ModelSpace,
    R: float,
    k_max: int = 5,
    n_r: int = 128,
    n_theta: int = 128,
    sign: float | None = None,
) -> list[Entry]:
    """Pointwise hierarchy domination and averaged-moment comparison."""
    hyp = _require_uniform(m, model, R)
    s = _sign(hyp.direction) if sign is None else sign
    tol = _tol_for(hyp.direction)
    grid = PolarGrid(metric=m, R=R, n_r=n_r, n_theta=n_theta)
    grid_fields = solve_hierarchy_grid(m, grid, k_max)
    model_levels = hierarchy_sequence(model, R, k_max, N=4096)
    entries = []
    for k in range(1, k_max + 1):
        transplant = model_levels[k - 1](grid.radii[1:])[:, None]
        gap = s * (transplant - grid_fields[k - 1].rings)
        gap_center = s * (
            float(model_levels[k - 1](0.0)) - grid_fields[k - 1].center
        )
        scale = float(model_levels[k - 1](0.0))
        worst = min(float(gap[:-1].min()), gap_center)
        entries.append(
            _entry(
                f"hierarchy_pointwise(k={k})",
                "transplant >= grid" if s > 0 else "transplant <= grid",
                worst,
                0.0,
                1.0,
                scale=scale,
                tol=tol,
            )
        )
    spec_model = moment_spectrum(model, R, k_max, N=4096)
    spec_grid = moments_grid(grid, grid_fields)
    vol_s_model = sphere_volume_model(model, R)
    vol_s_metric = sphere_length(m, R)
    for k in range(1, k_max + 1):
        avg_model = spec_model.moment(k) / vol_s_model
        avg_grid = spec_grid.moment(k) / vol_s_metric
        entries.append(
            _entry(
                f"averaged_moment(k={k})",
                "A_k/VolS model >= metric" if s > 0 else
                "A_k/VolS model <= metric",
                avg_model,
                avg_grid,
                s,
                scale=avg_model,
                tol=tol,
            )
        )
    return entries


def verify_torsional(
    m: PolarMetric2D,
    model: ModelSpace,
    R: float,
    n_r: int = 128,
    n_theta: int = 128,
    sign: float | None = None,
) -> list[Entry]:
    """Torsional rigidity of the equal-volume model ball versus the disk,
    plus the coarse exit-time bound on the disk rigidity."""
    hyp = _require_uniform(m, model, R)
    s = _sign(hyp.direction) if sign is None else sign
    if not balance_check(model, max(R, _s_radius(m, model, R))).balanced:
        raise ComparisonPreconditionError(
            f"model '{model.warping.label}' is not balanced"
        )
    grid = PolarGrid(metric=m, R=R, n_r=n_r, n_theta=n_theta)
    fields = solve_hierarchy_grid(m, grid, 1)
    a1_metric = moments_grid(grid, fields).moment(1)
    s_R = _s_radius(m, model, R)
    a1_model = moment_spectrum(model, s_R, 1, N=4096).moment(1)
    tol = _tol_for(hyp.direction)
    entries = [
        _entry(
            "torsional_rigidity",
            "A_1(sym ball) >= A_1(disk)" if s > 0 else
            "A_1(sym ball) <= A_1(disk)",
            a1_model,
            a1_metric,
            s,
            scale=a1_model,
            tol=tol,
        )
    ]
    if s > 0:
        e0 = float(mean_exit_profile(model, s_R)(0.0))
        bound = e0 * ball_area(m, R)
        entries.append(
            _entry(
                "torsional_coarse_bound",
                "A_1(disk) <= E_sym(0)*Vol(disk)",
                bound,
                a1_metric,
                1.0,
                scale=bound,
                tol=tol,
            )
        )
    return entries


def _s_radius(m: PolarMetric2D, model: ModelSpace, R: float) -> float:
    return ball_radius_from_volume(model, ball_area(m, R))


def verify_eigenvalue(
    m: PolarMetric2D,
    model: ModelSpace,
    R: float,
    n_r: int = 128,
    n_theta: int = 128,
    sign: float | None = None,
) -> Entry:
    """First Dirichlet eigenvalue of the model ball versus the metric disk."""
    hyp = _require_uniform(m, model, R)
    s = _sign(hyp.direction) if sign is None else sign
    lam_model = lambda1_shooting(model, R)
    grid = PolarGrid(metric=m, R=R, n_r=n_r, n_theta=n_theta)
    lam_metric = lambda1_grid(m, grid).power_value
    return _entry(
        "eigenvalue",
        "lambda1(model) <= lambda1(metric)" if s > 0 else
        "lambda1(model) >= lambda1(metric)",
        lam_metric,
        lam_model,
        s,
        scale=lam_model,
        tol=_tol_for(hyp.direction),
    )


def run_verification(
    m: PolarMetric2D,
    model: ModelSpace,
    R: float,
    n_r: int = 128,
    n_theta: int = 128,
    k_max: int = 5,
    direction_override: str | None = None,
) -> VerificationReport:
    """Full harness.  direction_override forces the asserted inequality
    direction ('model<=M' or 'model>=M'); it exists as a negative control
    and must make a healthy run fail."""
    hyp = _require_uniform(m, model, R)
    s = _sign(direction_override) if direction_override else _sign(hyp.direction)
    entries: list[Entry] = []
    entries.append(verify_mean_exit(m, model, R, n_r, n_theta, sign=s))
    radii = tuple(sorted({R / 4, R / 2, R}))
    entries.extend(
        verify_isoperimetric_volumes(m, model, R, r_samples=radii, sign=s)
    )
    entries.extend(
        verify_moment_spectrum(m, model, R, k_max, n_r, n_theta, sign=s)
    )
    entries.extend(verify_torsional(m, model, R, n_r, n_theta, sign=s))
    entries.append(verify_eigenvalue(m, model, R, n_r, n_theta, sign=s))
    return VerificationReport(
        metric=m.label,
        model=model.warping.label,
        radius=R,
        direction=direction_override or hyp.direction,
        hypothesis_min_margin=hyp.min_margin,
        entries=tuple(entries),
        grid=(n_r, n_theta),
    )
