"""Benchmark harness: run the variant matrix and emit performance profiles.

A run counts as solved only when it reaches the gradient tolerance within
its iteration and evaluation budgets. Profiles follow the usual
cost-ratio construction: r = cost / best cost on that problem, with
failures assigned an infinite ratio, and the curve reports the fraction of
problems whose ratio is within tau.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .driver import SolveReport, TrParams, solve
from .hessians import build_model
from .problems import get_problem

METRICS = ("fevals", "gevals", "time")

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True)
class RunSpec:
    problem: str
    alpha: float
    beta: float
    hessian: str = "exact"
    memory: int = 5
    eps: float = 1e-6
    max_iter: int = 10_000
    eval_budget: int = 100_000

    @property
    def variant(self) -> str:
        return f"{_fmt_ab(self.alpha)}_{_fmt_ab(self.beta)}"


def _fmt_ab(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:g}"


@dataclass(frozen=True)
class CellResult:
    status: str
    cost_f: int
    cost_g: int
    time_ms: float
    iters: int

    @property
    def solved(self) -> bool:
        return self.status == "first_order"


@dataclass
class CostMatrix:
    problems: list[str]
    variants: list[str]
    cells: dict[tuple[str, str], CellResult] = field(default_factory=dict)

    def cost(self, problem: str, variant: str, metric: str) -> float:
        cell = self.cells[(problem, variant)]
        if not cell.solved:
            return math.inf
        if metric == "fevals":
            return float(cell.cost_f)
        if metric == "gevals":
            return float(cell.cost_g)
        if metric == "time":
            return cell.time_ms
        raise ValueError(f"unknown metric {metric!r}")


def run_matrix(specs: list[RunSpec]) -> tuple[CostMatrix, dict[tuple[str, str], SolveReport]]:
    """Execute every spec; cells are keyed (problem, variant), sorted."""
    if not specs:
        raise ValueError("empty spec list")
    problems = sorted({s.problem for s in specs})
    variants = sorted({s.variant for s in specs})
    matrix = CostMatrix(problems, variants)
    reports: dict[tuple[str, str], SolveReport] = {}
    for spec in sorted(specs, key=lambda s: (s.problem, s.variant)):
        prob = get_problem(spec.problem)
        params = TrParams(alpha=spec.alpha, beta=spec.beta)
        model = build_model(spec.hessian, prob, memory=spec.memory)
        t0 = time.perf_counter()
        report = solve(
            prob,
            params,
            model,
            eps=spec.eps,
            max_iter=spec.max_iter,
            eval_budget=spec.eval_budget,
        )
        elapsed_ms = (time.perf_counter() - t0) * 1e3
        key = (spec.problem, spec.variant)
        matrix.cells[key] = CellResult(
            status=report.status,
            cost_f=report.evals.n_f,
            cost_g=report.evals.n_g,
            time_ms=elapsed_ms,
            iters=report.iterations,
        )
        reports[key] = report
    return matrix, reports


@dataclass
class ProfileCurve:
    variant: str
    taus: np.ndarray
    values: np.ndarray

    def at(self, tau: float) -> float:
        idx = np.searchsorted(self.taus, tau, side="right") - 1
        return float(self.values[idx]) if idx >= 0 else 0.0


def performance_profile(matrix: CostMatrix, metric: str = "fevals") -> list[ProfileCurve]:
    """Cost-ratio step functions, one per variant, right-continuous and
    non-decreasing with terminal value = solved fraction."""
    n_prob = len(matrix.problems)
    ratios: dict[str, list[float]] = {v: [] for v in matrix.variants}
    any_solved = False
    for prob in matrix.problems:
        costs = {v: matrix.cost(prob, v, metric) for v in matrix.variants}
        best = min(costs.values())
        if not math.isfinite(best):
            continue  # nobody solved it; counts only in the denominator
        any_solved = True
        for v, c in costs.items():
            if math.isfinite(c):
                ratios[v].append(c / best)
    if not any_solved:
        raise ValueError("no variant solved any problem")
    breakpoints = sorted({1.0} | {r for rs in ratios.values() for r in rs})
    taus = np.array(breakpoints)
    curves = []
    for v in matrix.variants:
        rv = np.array(sorted(ratios[v]))
        values = np.searchsorted(rv, taus, side="right") / n_prob
        curves.append(ProfileCurve(v, taus, values))
    return curves


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_MATRIX_HEADER = "problem,variant,status,cost_f,cost_g,time_ms,iters"


def matrix_to_csv(matrix: CostMatrix) -> str:
    lines = [_MATRIX_HEADER]
    for key in sorted(matrix.cells):
        c = matrix.cells[key]
        lines.append(
            f"{key[0]},{key[1]},{c.status},{c.cost_f},{c.cost_g},{c.time_ms:.17g},{c.iters}"
        )
    return "\n".join(lines) + "\n"


def read_matrix_csv(path) -> CostMatrix:
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0] != _MATRIX_HEADER:
        raise ValueError(f"{path}: not a cost-matrix CSV")
    cells: dict[tuple[str, str], CellResult] = {}
    for line in text[1:]:
        prob, variant, status, cf, cg, tms, iters = line.split(",")
        cells[(prob, variant)] = CellResult(status, int(cf), int(cg), float(tms), int(iters))
    problems = sorted({k[0] for k in cells})
    variants = sorted({k[1] for k in cells})
    return CostMatrix(problems, variants, cells)


def profile_to_csv(curves: list[ProfileCurve]) -> str:
    header = "tau," + ",".join(c.variant for c in curves)
    taus = curves[0].taus
    lines = [header]
    for i, tau in enumerate(taus):
        lines.append(f"{tau:.17g}," + ",".join(f"{c.values[i]:.17g}" for c in curves))
    return "\n".join(lines) + "\n"


def profile_to_svg(curves: list[ProfileCurve], metric: str) -> str:
    """Self-contained step plot of the profiles on a log2 tau axis."""
    width, height = 640, 480
    ml, mr, mt, mb = 60, 160, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    xmax = max(1e-9, max(math.log2(float(c.taus[-1])) for c in curves), 1.0)

    def sx(logtau: float) -> float:
        return ml + pw * logtau / xmax

    def sy(v: float) -> float:
        return mt + ph * (1.0 - v)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>',
        f'<text x="{ml + pw / 2}" y="{height - 12}" text-anchor="middle" '
        f'font-size="14">log2(tau), metric: {metric}</text>',
        f'<text x="18" y="{mt + ph / 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {mt + ph / 2})">fraction of problems</text>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = sy(frac)
        parts.append(
            f'<line x1="{ml - 4}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" stroke="black"/>'
            f'<text x="{ml - 8}" y="{y + 4:.1f}" text-anchor="end" font-size="11">{frac:g}</text>'
        )
    n_ticks = max(1, int(math.ceil(xmax)))
    for t in range(n_ticks + 1):
        lx = sx(min(t, xmax))
        parts.append(
            f'<line x1="{lx:.1f}" y1="{mt + ph}" x2="{lx:.1f}" y2="{mt + ph + 4}" stroke="black"/>'
            f'<text x="{lx:.1f}" y="{mt + ph + 18}" text-anchor="middle" font-size="11">{t}</text>'
        )
    for i, curve in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        pts = [(sx(0.0), sy(curve.at(1.0)))]
        for tau, val in zip(curve.taus, curve.values):
            lx = sx(min(math.log2(float(tau)), xmax))
            pts.append((lx, pts[-1][1]))  # horizontal run to the jump
            pts.append((lx, sy(float(val))))
        pts.append((ml + pw, pts[-1][1]))
        path = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{path}"/>'
        )
        ly = mt + 18 + 20 * i
        parts.append(
            f'<line x1="{ml + pw + 12}" y1="{ly - 4}" x2="{ml + pw + 36}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
            f'<text x="{ml + pw + 42}" y="{ly}" font-size="12">{curve.variant}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit(
    matrix: CostMatrix,
    profiles: dict[str, list[ProfileCurve]],
    out_dir,
) -> list[Path]:
    """Write matrix.csv plus profile_<metric>.csv/.svg into out_dir."""
    if not profiles or any(not curves for curves in profiles.values()):
        raise ValueError("no profiles to emit")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        path = out / "matrix.csv"
        path.write_text(matrix_to_csv(matrix))
        written.append(path)
        for metric, curves in sorted(profiles.items()):
            pcsv = out / f"profile_{metric}.csv"
            pcsv.write_text(profile_to_csv(curves))
            written.append(pcsv)
            psvg = out / f"profile_{metric}.svg"
            psvg.write_text(profile_to_svg(curves, metric))
            written.append(psvg)
    except OSError as exc:
        raise OSError(f"failed writing benchmark outputs under {out}: {exc}") from exc
    return written


def default_matrix_specs(
    variants=((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)),
    hessian: str = "exact",
    memory: int = 5,
    eps: float = 1e-6,
    max_iter: int = 10_000,
    eval_budget: int = 100_000,
    problems: list[str] | None = None,
) -> list[RunSpec]:
    from .problems import builtin_collection

    names = problems if problems is not None else [p.name for p in builtin_collection()]
    return [
        RunSpec(name, a, b, hessian, memory, eps, max_iter, eval_budget)
        for name in names
        for a, b in variants
    ]
