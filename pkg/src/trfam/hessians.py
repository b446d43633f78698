"""Model Hessians: exact, limited-memory BFGS/SR1, scripted, and zero.

Every model is a symmetric linear operator exposing ``apply`` (B v
products), ``update`` (pair ingestion with the usual safeguards) and
``operator_norm``. Limited-memory products use the direct compact
representation, not the inverse form, because both the subproblem and the
agreement ratio consume B v.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lcg import Lcg

# Pair-acceptance safeguards; standard choices.
BFGS_CURVATURE_TOL = 1e-8
SR1_DENOM_TOL = 1e-8

_DENSE_NORM_MAX_DIM = 64
_POWER_ITERS = 50
_POWER_RTOL = 1e-6
_POWER_SAFETY = 1.01


@dataclass(frozen=True)
class GrowthEnvelope:
    """Assumed growth mu*(1 + c^p) on max model-Hessian norms."""

    mu: float
    p: float
    counter_kind: str = "successful"  # or "iteration"

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.counter_kind not in ("successful", "iteration"):
            raise ValueError(f"unknown counter_kind {self.counter_kind!r}")


class HessianModel:
    """Base class; concrete models override the private hooks.

    A model instance is mutable and owned by a single solver run; distinct
    runs must not share one.
    """

    mode = "abstract"

    def __init__(self, dim: int, power_seed: int = 0):
        self.dim = dim
        self.power_seed = power_seed
        self._norm_cache: float | None = None

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"vector of shape {v.shape}, model dim {self.dim}")
        return self._apply(v)

    def update(self, s: np.ndarray, y: np.ndarray) -> bool:
        s = np.asarray(s, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.linalg.norm(s) == 0.0:
            raise ValueError("update with zero step")
        accepted = self._update(s, y)
        if accepted:
            self._norm_cache = None
        return accepted

    def operator_norm(self) -> float:
        if self._norm_cache is None:
            self._norm_cache = self._compute_norm()
        return self._norm_cache

    def begin_iteration(self, k: int) -> None:
        """Hook called by the driver at the top of iteration k."""

    # hooks -----------------------------------------------------------------

    def _apply(self, v):
        raise NotImplementedError

    def _update(self, s, y) -> bool:
        return False

    def _compute_norm(self) -> float:
        if self.dim <= _DENSE_NORM_MAX_DIM:
            return _dense_norm(self)
        return power_norm_estimate(self)


def _dense_norm(model: HessianModel) -> float:
    mat = dense_matrix(model)
    return float(np.max(np.abs(np.linalg.eigvalsh(mat)))) if model.dim else 0.0


def dense_matrix(model: HessianModel) -> np.ndarray:
    cols = [model.apply(col) for col in np.eye(model.dim)]
    return np.column_stack(cols)


def power_norm_estimate(
    model: HessianModel,
    max_iters: int = _POWER_ITERS,
    rtol: float = _POWER_RTOL,
    seed: int | None = None,
) -> float:
    """Power-iteration spectral norm, inflated by a small safety factor.

    Overestimation only loosens the scaled radius; underestimation could
    violate its contract, hence the 1.01 inflation.
    """
    if seed is None:
        seed = model.power_seed
    v = Lcg(seed).vector(model.dim)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return 0.0
    v /= nv
    lam = 0.0
    for _ in range(max_iters):
        w = model.apply(v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        if abs(nw - lam) <= rtol * nw:
            lam = nw
            break
        lam = nw
        v = w / nw
    return lam * _POWER_SAFETY


class ZeroModel(HessianModel):
    mode = "zero"

    def _apply(self, v):
        return np.zeros_like(v)

    def _compute_norm(self):
        return 0.0


class ScriptedModel(HessianModel):
    """Scalar multiples of the identity, indexed by the iteration counter.

    Iterations beyond the script hold the last value; the worst-case
    verifier detects any overrun through its own iteration-count check.
    """

    mode = "scripted"

    def __init__(self, values, dim: int = 1):
        super().__init__(dim)
        self.values = np.asarray(values, dtype=float)
        if self.values.size == 0:
            raise ValueError("empty script")
        self._k = 0

    @property
    def scalar(self) -> float:
        return float(self.values[min(self._k, self.values.size - 1)])

    def begin_iteration(self, k: int) -> None:
        self._k = k
        self._norm_cache = None

    def _apply(self, v):
        return self.scalar * v

    def _compute_norm(self):
        return abs(self.scalar)


class ExactHessian(HessianModel):
    """Dense Hessian of the objective, re-evaluated as the iterate moves."""

    mode = "exact"

    def __init__(self, eval_hess, x0):
        x0 = np.asarray(x0, dtype=float)
        super().__init__(len(x0))
        self._eval_hess = eval_hess
        self._x = x0.copy()
        self._mat = np.asarray(eval_hess(self._x), dtype=float)

    def _apply(self, v):
        return self._mat @ v

    def _update(self, s, y):
        self._x = self._x + s
        self._mat = np.asarray(self._eval_hess(self._x), dtype=float)
        return True

    def _compute_norm(self):
        return float(np.max(np.abs(np.linalg.eigvalsh(self._mat))))


class _PairModel(HessianModel):
    """Shared storage for limited-memory models: a window of (s, y) pairs.

    ``bb_scaling`` refreshes the base scale to s'y/s's of the newest
    accepted pair; off by default so base-dependent constants stay put.
    """

    def __init__(self, dim, memory=5, b0_scale=1.0, power_seed=0, bb_scaling=False):
        super().__init__(dim, power_seed)
        if memory < 1:
            raise ValueError("memory must be positive")
        if not b0_scale > 0:
            raise ValueError("b0_scale must be positive")
        self.memory = memory
        self.b0_scale = b0_scale
        self.bb_scaling = bb_scaling
        self.pairs: list[tuple[np.ndarray, np.ndarray]] = []

    def _push(self, s, y):
        if len(self.pairs) == self.memory:
            self.pairs.pop(0)
        self.pairs.append((s.copy(), y.copy()))
        if self.bb_scaling:
            scale = float(s @ y) / float(s @ s)
            if scale > 0:
                self.b0_scale = scale

    def _mats(self):
        S = np.column_stack([p[0] for p in self.pairs])
        Y = np.column_stack([p[1] for p in self.pairs])
        return S, Y


class LbfgsModel(_PairModel):
    """Limited-memory BFGS in the compact form
    B = sigma I - [sigma S, Y] M^{-1} [sigma S, Y]^T,
    M = [[sigma S^T S, L], [L^T, -D]].
    """

    mode = "lbfgs"

    def _apply(self, v):
        if not self.pairs:
            return self.b0_scale * v
        S, Y = self._mats()
        sig = self.b0_scale
        SY = S.T @ Y
        L = np.tril(SY, -1)
        D = np.diag(np.diag(SY))
        m = len(self.pairs)
        M = np.block([[sig * (S.T @ S), L], [L.T, -D]])
        W = np.hstack([sig * S, Y])
        z = np.linalg.solve(M, W.T @ v)
        return sig * v - W @ z

    def _update(self, s, y):
        # curvature safeguard: s'y >= tol * |s| * |y|, and strictly positive
        sy = float(s @ y)
        ns, ny = np.linalg.norm(s), np.linalg.norm(y)
        if sy <= 0.0 or sy < BFGS_CURVATURE_TOL * ns * ny:
            return False
        self._push(s, y)
        return True


class Lsr1Model(_PairModel):
    """Limited-memory SR1 in the compact form
    B = sigma I + (Y - sigma S) M^{-1} (Y - sigma S)^T,
    M = D + L + L^T - sigma S^T S.
    """

    mode = "lsr1"

    def _apply(self, v):
        if not self.pairs:
            return self.b0_scale * v
        pairs_backup = list(self.pairs)
        try:
            while True:
                try:
                    return self._apply_window(v)
                except np.linalg.LinAlgError:
                    # window made M singular; shed the oldest pair
                    if len(self.pairs) == 1:
                        return self.b0_scale * v
                    self.pairs.pop(0)
        finally:
            self.pairs = pairs_backup

    def _apply_window(self, v):
        S, Y = self._mats()
        sig = self.b0_scale
        Psi = Y - sig * S
        SY = S.T @ Y
        L = np.tril(SY, -1)
        D = np.diag(np.diag(SY))
        M = D + L + L.T - sig * (S.T @ S)
        z = np.linalg.solve(M, Psi.T @ v)
        return sig * v + Psi @ z

    def _update(self, s, y):
        z = y - self.apply(s)
        nz = np.linalg.norm(z)
        # both-zero case counts as rejected: the update is a no-op anyway
        if nz == 0.0 or abs(float(s @ z)) < SR1_DENOM_TOL * np.linalg.norm(s) * nz:
            return False
        self._push(s, y)
        return True


def build_model(
    mode: str,
    problem=None,
    memory: int = 5,
    b0_scale: float = 1.0,
    script=None,
    dim: int | None = None,
    power_seed: int = 0,
    bb_scaling: bool = False,
) -> HessianModel:
    """Construct the model named by ``mode`` for a problem (or raw dim)."""
    if dim is None:
        if problem is None:
            raise ValueError("need a problem or an explicit dim")
        dim = problem.dim
    if mode == "zero":
        return ZeroModel(dim, power_seed)
    if mode == "lbfgs":
        return LbfgsModel(dim, memory, b0_scale, power_seed, bb_scaling)
    if mode == "lsr1":
        return Lsr1Model(dim, memory, b0_scale, power_seed, bb_scaling)
    if mode == "scripted":
        if script is None:
            raise ValueError("scripted mode needs a script")
        return ScriptedModel(script, dim)
    if mode == "exact":
        if problem is None or problem.eval_hess is None:
            raise ValueError("exact mode needs a problem with eval_hess")
        return ExactHessian(problem.eval_hess, problem.x0)
    raise ValueError(f"unknown hessian mode {mode!r}")


def measure_envelope(log, p: float, counter_kind: str = "successful") -> float:
    """Smallest mu with max_{j<=k} |B_j| <= mu (1 + c_k^p) over a run log.

    ``log`` is a sequence of iteration records carrying ``bnorm`` plus
    ``n_succ``/``k``; the counter c_k is |S_k| or k per ``counter_kind``.
    """
    if counter_kind not in ("successful", "iteration"):
        raise ValueError(f"unknown counter_kind {counter_kind!r}")
    records = list(log)
    if not records:
        raise ValueError("empty iteration log")
    mu_hat = 0.0
    running_max = 0.0
    for rec in records:
        running_max = max(running_max, rec.bnorm)
        c = rec.n_succ if counter_kind == "successful" else rec.k
        mu_hat = max(mu_hat, running_max / (1.0 + float(c) ** p))
    return mu_hat
