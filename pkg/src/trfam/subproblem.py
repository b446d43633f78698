"""Trust-region subproblem machinery.

The subproblem minimizes the quadratic model m(s) = f + g's + s'Bs/2 over
the ball |s| <= R with the scaled radius R = |g|^alpha (1+|B|)^-beta Delta.
Steps come from a Steihaug-type truncated conjugate gradient whose first
iterate is the Cauchy point, so the fraction-of-Cauchy-decrease contract
holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Array = np.ndarray


@dataclass(frozen=True)
class RadiusSpec:
    """Ingredients of the scaled trust-region radius.

    ``gnorm_term``/``bnorm_term`` hold either the current gradient/model
    norms or the historical min/max, depending on ``mode``.
    """

    alpha: float
    beta: float
    delta: float
    gnorm_term: float
    bnorm_term: float
    mode: str = "current"


def effective_radius(spec: RadiusSpec) -> float:
    """gnorm^alpha * (1 + bnorm)^(-beta) * delta."""
    if not spec.gnorm_term > 0:
        raise ValueError("zero gradient norm: caller must stop at stationarity")
    if not spec.delta > 0:
        raise ValueError("delta must be positive")
    return (
        spec.gnorm_term**spec.alpha
        * (1.0 + spec.bnorm_term) ** (-spec.beta)
        * spec.delta
    )


@dataclass
class StepResult:
    s: Array
    model_decrease: float
    cauchy_decrease: float
    boundary_hit: bool
    cg_iters: int


def _matvec(B, v: Array) -> Array:
    if hasattr(B, "apply"):
        return B.apply(v)
    return np.asarray(B, dtype=float) @ v


def cauchy_point(g: Array, B, radius: float) -> StepResult:
    """Minimizer of the model along -g within the ball of the given radius.

    With positive curvature along g the step length is
    min(|g|^2 / g'Bg, radius/|g|); otherwise (concave or linear 1-d model)
    the minimum sits on the boundary.
    """
    g = np.asarray(g, dtype=float)
    gnorm = np.linalg.norm(g)
    if gnorm == 0.0:
        raise ValueError("zero gradient")
    if not radius > 0:
        raise ValueError("radius must be positive")
    Bg = _matvec(B, g)
    gBg = float(g @ Bg)
    t_boundary = radius / gnorm
    if gBg > 0.0:
        t = min(gnorm**2 / gBg, t_boundary)
    else:
        t = t_boundary
    decrease = t * gnorm**2 - 0.5 * t * t * gBg
    return StepResult(
        s=-t * g,
        model_decrease=decrease,
        cauchy_decrease=decrease,
        boundary_hit=(t == t_boundary),
        cg_iters=0,
    )


def _to_boundary(s: Array, d: Array, radius: float) -> float:
    """Positive sigma with |s + sigma d| = radius."""
    dd = float(d @ d)
    sd = float(s @ d)
    ss = float(s @ s)
    disc = sd * sd + dd * (radius * radius - ss)
    return (-sd + np.sqrt(max(disc, 0.0))) / dd


def solve_tcg(
    g: Array,
    B,
    radius: float,
    kappa_mdc: float = 0.5,
    cg_tol: float | None = None,
    max_cg: int | None = None,
) -> StepResult:
    """Steihaug truncated CG on the ball of the given radius.

    Starts from s = 0 and stops on (i) residual <= cg_tol |g|, (ii) negative
    curvature (step to the boundary along the current direction), (iii) a
    trial iterate leaving the ball (step to the boundary), or (iv) max_cg
    iterations. A trial landing exactly on the boundary counts as a
    boundary hit. The first iterate is the Cauchy point and the model
    decrease is monotone along CG, so the returned decrease is at least the
    Cauchy decrease.
    """
    g = np.asarray(g, dtype=float)
    n = g.size
    gnorm = np.linalg.norm(g)
    if gnorm == 0.0:
        raise ValueError("zero gradient")
    if not radius > 0:
        raise ValueError("radius must be positive")
    if cg_tol is None:
        cg_tol = min(0.1, np.sqrt(gnorm))
    if max_cg is None:
        max_cg = n

    s = np.zeros(n)
    r = g.copy()  # model gradient at s
    d = -g
    rr = gnorm**2
    iters = 0
    boundary = False
    for _ in range(max_cg):
        Bd = _matvec(B, d)
        dBd = float(d @ Bd)
        iters += 1
        if dBd <= 0.0:
            s = s + _to_boundary(s, d, radius) * d
            boundary = True
            break
        alpha = rr / dBd
        trial = s + alpha * d
        if np.linalg.norm(trial) >= radius:
            s = s + _to_boundary(s, d, radius) * d
            boundary = True
            break
        s = trial
        r = r + alpha * Bd
        rr_new = float(r @ r)
        if np.sqrt(rr_new) <= cg_tol * gnorm:
            break
        d = -r + (rr_new / rr) * d
        rr = rr_new

    decrease = -(float(g @ s) + 0.5 * float(s @ _matvec(B, s)))
    if not np.isfinite(decrease):
        raise FloatingPointError("non-finite model decrease: ill-posed model")
    cp = cauchy_point(g, B, radius)
    return StepResult(
        s=s,
        model_decrease=decrease,
        cauchy_decrease=cp.model_decrease,
        boundary_hit=boundary,
        cg_iters=iters,
    )


def newton_step_1d(g: Array, B, radius: float) -> StepResult:
    """Exact subproblem solve in one dimension.

    For positive curvature the interior minimizer is -g/b; concave or
    linear models, and Newton steps past the radius, end on the boundary.
    The single division keeps the step bit-reproducible, which the
    worst-case verifier relies on.
    """
    g = np.asarray(g, dtype=float)
    if g.size != 1:
        raise ValueError("newton_step_1d only handles dimension 1")
    g0 = float(g[0])
    if g0 == 0.0:
        raise ValueError("zero gradient")
    b = float(_matvec(B, np.ones(1))[0])
    boundary = True
    if b > 0.0:
        step = -(g0 / b)
        if abs(step) <= radius:
            boundary = abs(step) == radius
        else:
            step = -np.sign(g0) * radius
    else:
        step = -np.sign(g0) * radius
    decrease = -(g0 * step + 0.5 * b * step * step)
    cp = cauchy_point(g, B, radius)
    return StepResult(
        s=np.array([step]),
        model_decrease=decrease,
        cauchy_decrease=cp.model_decrease,
        boundary_hit=boundary,
        cg_iters=1,
    )
