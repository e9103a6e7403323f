"""Regularization paths over a logarithmic penalty grid, fitted with warm starts.

A single total level ``lam`` is split by a mixing weight ``alpha`` into the
group two-norm level ``(1-alpha)*lam`` and the one-norm level ``alpha*lam``;
the grid starts at the smallest level whose optimum is all-zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Coefficients, GroupedProblem, PenaltySpec
from .solver import SolverOptions, fit, soft_threshold

__all__ = ["PathSpec", "PathPoint", "PathResult", "lambda_max", "fit_path"]


@dataclass(frozen=True)
class PathSpec:
    """Grid shape: ``n_points`` levels, log-spaced from the all-zero level down
    to ``ratio_min`` times it, mixed by ``mixing`` (0 = group penalty only,
    1 = one-norm only)."""

    n_points: int = 100
    ratio_min: float = 1e-3
    mixing: float = 0.5

    def __post_init__(self):
        if int(self.n_points) < 2:
            raise ValueError(f"n_points must be at least 2, got {self.n_points}")
        if not (0.0 < self.ratio_min < 1.0):
            raise ValueError(f"ratio_min must be in (0, 1), got {self.ratio_min}")
        if not (0.0 <= self.mixing <= 1.0):
            raise ValueError(f"mixing must be in [0, 1], got {self.mixing}")


@dataclass(frozen=True)
class PathPoint:
    """One grid point: the penalty levels, the fitted coefficients, and
    per-fit diagnostics."""

    lam: float
    penalty: PenaltySpec
    coefficients: Coefficients
    objective: float
    sweeps: int
    converged: bool
    kkt_worst: float
    n_active_groups: int
    n_nonzero: int


@dataclass(frozen=True)
class PathResult:
    """A fitted path: strictly decreasing levels, one PathPoint per level."""

    lambdas: np.ndarray
    points: tuple[PathPoint, ...]
    lambda_max: float
    mixing: float
    warm_started: bool = True

    def __post_init__(self):
        lams = np.asarray(self.lambdas, dtype=float)
        lams.setflags(write=False)
        object.__setattr__(self, "lambdas", lams)


def _block_passes(a: np.ndarray, w: float, alpha: float, lam: float) -> bool:
    # evaluate with the exact expressions the solver's screen uses, so a
    # passing level screens to zero under fit without an ulp of slack
    g = soft_threshold(a, alpha * lam)
    return bool(np.linalg.norm(g) <= ((1.0 - alpha) * lam) * w)


def lambda_max(problem: GroupedProblem, mixing: float) -> float:
    """Smallest total level at which every block's zero test passes at beta = 0.

    Closed form at the mixing endpoints; in between, the per-block pass
    condition is monotone in the level, so the root is found by bisection
    to 1e-10 relative width, returning the passing endpoint (fitting at the
    returned level therefore yields all zeros).
    """
    alpha = float(mixing)
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"mixing must be in [0, 1], got {mixing}")
    # per-block products, computed exactly as fit computes them at beta = 0
    blocks = [
        (problem.X[:, sl].T @ problem.y, float(w))
        for sl, w in zip(problem.slices, problem.weights)
    ]
    sup = max(float(np.abs(a).max()) for a, _ in blocks)
    if sup == 0.0:
        return 0.0
    if alpha == 1.0:
        return sup
    if alpha == 0.0:
        return max(float(np.linalg.norm(a)) / w for a, w in blocks)
    # per-block passing levels: a level large enough that either the shrunk
    # vector vanishes or its norm is inside the group radius; doubled so the
    # starting point passes with margin, not by an ulp
    hi = 0.0
    for a, w in blocks:
        bound = min(
            float(np.linalg.norm(a)) / ((1.0 - alpha) * w),
            float(np.abs(a).max()) / alpha,
        )
        hi = max(hi, bound)
    hi *= 2.0
    lo = 0.0
    while hi - lo > 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        if all(_block_passes(a, w, alpha, mid) for a, w in blocks):
            hi = mid
        else:
            lo = mid
    return hi


def fit_path(
    problem: GroupedProblem,
    spec: PathSpec | None = None,
    opts: SolverOptions | None = None,
) -> PathResult:
    """Fit the whole grid in decreasing order, warm-starting each level from
    the previous solution. Non-convergence at a level is recorded on its
    PathPoint, not raised."""
    spec = spec or PathSpec()
    opts = opts or SolverOptions()
    lmax = lambda_max(problem, spec.mixing)
    if lmax <= 0.0:
        raise ValueError("response carries no signal: the all-zero level is 0")
    exponents = np.linspace(0.0, 1.0, int(spec.n_points))
    lambdas = lmax * spec.ratio_min**exponents
    alpha = spec.mixing
    warm: Coefficients | None = None
    points: list[PathPoint] = []
    for lam in lambdas:
        penalty = PenaltySpec(lambda1=(1.0 - alpha) * lam, lambda2=alpha * lam)
        result = fit(problem, penalty, opts=opts, warm=warm)
        warm = result.coefficients
        points.append(
            PathPoint(
                lam=float(lam),
                penalty=penalty,
                coefficients=result.coefficients,
                objective=result.objective,
                sweeps=result.sweeps,
                converged=result.converged,
                kkt_worst=result.kkt.worst_violation,
                n_active_groups=int(problem.active_groups(result.coefficients).sum()),
                n_nonzero=result.coefficients.n_nonzero,
            )
        )
    return PathResult(
        lambdas=lambdas,
        points=tuple(points),
        lambda_max=lmax,
        mixing=alpha,
        warm_started=True,
    )
