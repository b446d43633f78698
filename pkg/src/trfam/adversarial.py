"""Worst-case one-dimensional instances on which the method is provably slow.

The generator lays down knot sequences (gradients shrinking toward the
target tolerance, model Hessians growing like k^p, unit-model Newton
steps), then realizes them as a C^1 function by piecewise cubic Hermite
interpolation with quadratic tails. Running the driver on the result must
take exactly k_eps iterations, every one of them with agreement ratio 2;
the verifier checks that, bit for bit where the construction allows it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .driver import SolveReport, TrParams, VERY_SUCCESSFUL, solve
from .hessians import ScriptedModel
from .problems import Problem

K_EPS_CAP = 10**8

RHO_TOL = 1e-9
FINAL_GRAD_TOL = 1e-12


@dataclass(frozen=True)
class AdversarialSpec:
    """Target tolerance, Hessian growth exponent, and radius parameters.

    ``c`` only matters when p = 1; it must then be positive (c = 0 would
    collapse the instance to a single knot with a degenerate f_0).
    """

    eps: float
    p: float
    c: float = 1.0
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.p == 1.0 and not self.c > 0.0:
            raise ValueError("p = 1 requires c > 0")
        if self.alpha > 1 or self.beta > 1:
            raise ValueError("alpha and beta must be <= 1")


def k_epsilon(spec: AdversarialSpec, cap: int = K_EPS_CAP) -> int:
    """floor(eps^(-2/(1-p))) for p < 1, floor(exp(c eps^-2)) for p = 1."""
    if spec.p == 1.0:
        log_k = spec.c * spec.eps**-2
        if log_k > math.log(cap):
            raise ValueError(
                f"k_eps = exp({log_k:.3g}) exceeds the cap {cap:g}; use a larger eps"
            )
        k = int(math.floor(math.exp(log_k)))
    else:
        value = spec.eps ** (-2.0 / (1.0 - spec.p))
        if value > cap:
            raise ValueError(f"k_eps = {value:.3g} exceeds the cap {cap:g}; use a larger eps")
        k = int(math.floor(value))
    return k


@dataclass
class AdversarialInstance:
    k_eps: int
    knots_x: np.ndarray
    f_vals: np.ndarray
    g_vals: np.ndarray
    B_vals: np.ndarray
    s_vals: np.ndarray
    delta0: float
    kappa_f: float
    spec: AdversarialSpec


def generate(spec: AdversarialSpec, cap: int = K_EPS_CAP) -> AdversarialInstance:
    """Build the knot sequences.

    g_k = -eps (1 + (k_eps - k)/k_eps), B_0 = 1 and B_k = k^p, steps
    s_k = -g_k / B_k, positions accumulate from x_0 = 0, and f follows the
    recurrence f_{k+1} = f_k + g_k s_k from the prescribed f_0. The
    accumulation is done in plain float64 so a driver walking the knots
    reproduces them exactly.
    """
    keps = k_epsilon(spec, cap)
    ks = np.arange(keps + 1, dtype=float)
    omega = (keps - ks) / keps
    g = -spec.eps * (1.0 + omega)
    B = np.empty(keps + 1)
    B[0] = 1.0
    B[1:] = ks[1:] ** spec.p
    s = -(g[:-1] / B[:-1])

    x = np.empty(keps + 1)
    x[0] = 0.0
    for k in range(keps):
        x[k + 1] = x[k] + s[k]

    f = np.empty(keps + 1)
    if spec.p == 1.0:
        f[0] = 8.0 * spec.eps**2 + 4.0 * spec.c
    else:
        f[0] = 8.0 * spec.eps**2 + 4.0 / (1.0 - spec.p)
    for k in range(keps):
        f[k + 1] = f[k] + g[k] * s[k]

    inst = AdversarialInstance(
        k_eps=keps,
        knots_x=x,
        f_vals=f,
        g_vals=g,
        B_vals=B,
        s_vals=s,
        delta0=2.0 ** (2.0 - spec.alpha),
        kappa_f=max(float(f[0]), 2.0),
        spec=spec,
    )
    _check_instance(inst)
    return inst


def _check_instance(inst: AdversarialInstance) -> None:
    if not np.all(inst.s_vals > 0):
        raise AssertionError("steps must be positive")
    if not np.all(np.diff(inst.f_vals) < 0):
        raise AssertionError("f values must be strictly decreasing")
    if not (np.all(inst.f_vals >= 0) and np.all(inst.f_vals <= inst.f_vals[0])):
        raise AssertionError("f values must stay inside [0, f_0]")
    gabs = np.abs(inst.g_vals)
    if not (np.all(gabs[:-1] > inst.spec.eps) and gabs[-1] == inst.spec.eps):
        raise AssertionError("gradient magnitudes must exceed eps until the last knot")


class Interpolant1D:
    """C^1 realization of an instance: cubic Hermite segments between the
    knots plus quadratic tails of unit curvature on both sides.

    Evaluation at a knot returns the stored value/slope exactly: the local
    Horner forms are anchored at the left endpoint of each segment and at
    the junction points of the tails.
    """

    def __init__(self, inst: AdversarialInstance, tail_curvature: float = 1.0):
        if not tail_curvature > 0:
            raise ValueError("tail curvature must be positive for boundedness below")
        self.instance = inst
        self.tail_curvature = tail_curvature
        x, f, g = inst.knots_x, inst.f_vals, inst.g_vals
        self._x = x
        self._f = f
        self._g = g
        h = np.diff(x)
        d = np.diff(f)
        # cubic f(x0 + t h) = f0 + t (h g0 + t (c2 + t c3)) on each segment
        self._h = h
        self._c2 = 3.0 * d - h * (2.0 * g[:-1] + g[1:])
        self._c3 = -2.0 * d + h * (g[:-1] + g[1:])

    def __call__(self, xq: float) -> tuple[float, float]:
        """Return (f(x), f'(x))."""
        x = float(xq)
        knots = self._x
        tc = self.tail_curvature
        if x < knots[0]:
            dx = x - knots[0]
            return (
                self._f[0] + self._g[0] * dx + 0.5 * tc * dx * dx,
                self._g[0] + tc * dx,
            )
        if x >= knots[-1]:
            dx = x - knots[-1]
            return (
                self._f[-1] + self._g[-1] * dx + 0.5 * tc * dx * dx,
                self._g[-1] + tc * dx,
            )
        i = int(np.searchsorted(knots, x, side="right")) - 1
        h = self._h[i]
        t = (x - knots[i]) / h
        c2, c3 = self._c2[i], self._c3[i]
        val = self._f[i] + t * (h * self._g[i] + t * (c2 + t * c3))
        slope = self._g[i] + t * (2.0 * c2 + 3.0 * c3 * t) / h
        return val, slope

    def second_derivative_bound(self) -> float:
        """Exact sup of |f''|: per segment f'' is linear in x, so the
        maximum sits at an endpoint; the tails contribute the curvature."""
        h2 = self._h**2
        at0 = np.abs(2.0 * self._c2) / h2
        at1 = np.abs(2.0 * self._c2 + 6.0 * self._c3) / h2
        return float(max(self.tail_curvature, at0.max(), at1.max()))

    def lower_bound(self) -> float:
        """Exact global infimum, from tail vertices and per-segment minima."""
        tc = self.tail_curvature
        best = float(self._f[0]) if self._g[0] <= 0 else float(
            self._f[0] - self._g[0] ** 2 / (2 * tc)
        )
        right = float(self._f[-1]) if self._g[-1] >= 0 else float(
            self._f[-1] - self._g[-1] ** 2 / (2 * tc)
        )
        best = min(best, right)
        for i in range(len(self._h)):
            best = min(best, float(self._f[i]), float(self._f[i + 1]))
            # interior critical points: 3 c3 t^2 + 2 c2 t + h g0 = 0
            a, b, c = 3.0 * self._c3[i], 2.0 * self._c2[i], self._h[i] * self._g[i]
            for t in np.roots([a, b, c]) if a != 0 or b != 0 else []:
                if np.isreal(t) and 0.0 < t.real < 1.0:
                    tr = float(t.real)
                    val = self._f[i] + tr * (
                        self._h[i] * self._g[i] + tr * (self._c2[i] + tr * self._c3[i])
                    )
                    best = min(best, float(val))
        return best

    def as_problem(self, name: str = "adversarial") -> Problem:
        def f(x):
            return self(x[0])[0]

        def g(x):
            return np.array([self(x[0])[1]])

        def h(x):
            d = 1e-7
            _, gp = self(x[0] + d)
            _, gm = self(x[0] - d)
            return np.array([[(gp - gm) / (2 * d)]])

        return Problem(
            name=name,
            dim=1,
            eval_f=f,
            eval_grad=g,
            x0=np.array([self._x[0]]),
            f_low_hint=self.lower_bound(),
            eval_hess=h,
        )

    def sample(self, n: int = 2001, pad: float = 1.0):
        """(x, f, f') arrays over [x_0 - pad, x_last + pad]."""
        xs = np.linspace(self._x[0] - pad, self._x[-1] + pad, n)
        vals = np.array([self(x) for x in xs])
        return xs, vals[:, 0], vals[:, 1]


def build_interpolant(inst: AdversarialInstance) -> Interpolant1D:
    return Interpolant1D(inst)


@dataclass
class SharpnessReport:
    spec: AdversarialSpec
    k_eps: int
    iterations: int
    all_very_successful: bool
    max_rho_error: float
    max_step_ratio: float
    steps_inside: bool
    strictly_inside: bool
    final_grad_abs: float
    final_grad_error: float
    f0: float
    delta0: float
    mismatches: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "eps": self.spec.eps,
            "p": self.spec.p,
            "c": self.spec.c,
            "alpha": self.spec.alpha,
            "beta": self.spec.beta,
            "k_eps": self.k_eps,
            "iterations": self.iterations,
            "all_very_successful": self.all_very_successful,
            "max_rho_error": self.max_rho_error,
            "max_step_ratio": self.max_step_ratio,
            "steps_inside": self.steps_inside,
            "strictly_inside": self.strictly_inside,
            "final_grad_abs": self.final_grad_abs,
            "final_grad_error": self.final_grad_error,
            "f0": self.f0,
            "delta0": self.delta0,
            "passed": self.passed,
            "mismatches": self.mismatches[:20],
        }


def verify_sharpness(
    spec: AdversarialSpec,
    params: TrParams | None = None,
    cap: int = K_EPS_CAP,
) -> tuple[SharpnessReport, SolveReport]:
    """Run the driver on the generated instance and check the worst-case
    facts it was built to force: exactly k_eps iterations, agreement ratio
    2 at every iteration, every step inside the scaled radius, and a final
    gradient of magnitude eps.
    """
    inst = generate(spec, cap)
    interp = build_interpolant(inst)
    problem = interp.as_problem()

    if params is None:
        params = TrParams(alpha=spec.alpha, beta=spec.beta, delta0=inst.delta0)
    else:
        if params.delta0 != inst.delta0:
            raise ValueError(f"params.delta0 must equal the instance delta0 {inst.delta0}")
        if params.gamma3 < 1.0:
            raise ValueError("verification requires gamma3 >= 1 (radius must not shrink)")
        if (params.alpha, params.beta) != (spec.alpha, spec.beta):
            raise ValueError("params alpha/beta must match the spec")

    model = ScriptedModel(inst.B_vals)
    report = solve(
        problem,
        params,
        model,
        eps=spec.eps,
        max_iter=inst.k_eps + 10,
        step_solver="newton1d",
    )

    mism: list[dict] = []
    if report.iterations != inst.k_eps:
        mism.append(
            {"check": "iteration_count", "expected": inst.k_eps, "observed": report.iterations}
        )
    max_rho_err = 0.0
    max_ratio = 0.0
    all_vs = True
    for r in report.log:
        err = abs(r.rho - 2.0)
        if not err <= RHO_TOL:
            mism.append({"check": "rho", "k": r.k, "expected": 2.0, "observed": r.rho})
        max_rho_err = max(max_rho_err, err)
        ratio = r.snorm / r.eff_radius
        if not ratio <= 1.0:
            mism.append(
                {"check": "step_inside", "k": r.k, "snorm": r.snorm, "radius": r.eff_radius}
            )
        max_ratio = max(max_ratio, ratio)
        if r.status != VERY_SUCCESSFUL:
            all_vs = False
    final_err = abs(report.final_gnorm - spec.eps)
    if not final_err <= FINAL_GRAD_TOL:
        mism.append(
            {"check": "final_gradient", "expected": spec.eps, "observed": report.final_gnorm}
        )

    sharp = SharpnessReport(
        spec=spec,
        k_eps=inst.k_eps,
        iterations=report.iterations,
        all_very_successful=all_vs,
        max_rho_error=max_rho_err,
        max_step_ratio=max_ratio,
        steps_inside=max_ratio <= 1.0,
        strictly_inside=max_ratio < 1.0,
        final_grad_abs=report.final_gnorm,
        final_grad_error=final_err,
        f0=float(inst.f_vals[0]),
        delta0=inst.delta0,
        mismatches=mism,
    )
    return sharp, report


def emit_function_csv(interp: Interpolant1D, path, n: int = 2001) -> None:
    """Figure-style dump: x, f, fprime on a uniform grid with unit padding."""
    xs, fs, gs = interp.sample(n)
    with open(path, "w") as fh:
        fh.write("x,f,fprime\n")
        for row in zip(xs, fs, gs):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
