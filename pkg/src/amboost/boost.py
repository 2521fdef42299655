"""Gradient boosting engine for additive models.

Fits base learners against the negative functional gradient, selects
blocks greedily, jointly or cyclically, applies damped updates and
records the full parameter path. Also provides boosting with generic
full-rank linear smoothers and a divergence detector for the paths.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import losses as losses_mod
from .errors import NumericError

MODES = ("joint", "greedy", "cyclic")
INITS = ("zero", "offset")
TERMINATIONS = ("max_iter", "tol", "divergence")

JOINT_SENTINEL = -1

# Loss growth beyond this factor over the run start trips the guard.
GUARD_GROWTH = 10.0


def _loss_grew(current, reference):
    """Growth beyond 10x the reference, robust to nonpositive losses."""
    return current - reference > (GUARD_GROWTH - 1.0) * max(abs(reference), 1e-12)


@dataclass(frozen=True)
class BoostConfig:
    """Run configuration for the boosting engine.

    Parameters
    ----------
    nu : float
        Step size in (0, 1].
    max_iter : int
        Iteration cap, at least 1.
    mode : str
        ``'joint'`` refits all blocks together each step, ``'greedy'``
        updates the best-fitting block, ``'cyclic'`` round-robins over
        blocks.
    init : str
        ``'zero'`` starts at the origin; ``'offset'`` starts the fit at
        the link-transformed outcome mean (coefficients still at zero).
    stop_tol : float
        Stop once the per-step loss decrease falls below this. Zero
        disables the check so paths match closed-form series exactly.
    divergence_guard : bool
        Catch numeric overflow and runaway loss growth, recording a
        divergence termination instead of raising.
    """

    nu: float = 0.1
    max_iter: int = 100
    mode: str = "greedy"
    init: str = "zero"
    stop_tol: float = 0.0
    divergence_guard: bool = False

    def __post_init__(self):
        if not 0.0 < self.nu <= 1.0:
            raise ValueError("step size must be in (0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.init not in INITS:
            raise ValueError(f"unknown init {self.init!r}")
        if self.stop_tol < 0.0:
            raise ValueError("stop_tol must be nonnegative")


@dataclass
class BoostPath:
    """Full iterate history of one boosting run.

    ``betas`` has one row per iterate including the start, ``losses`` and
    ``grad_norms`` match it, ``selected`` has one entry per step taken
    (``-1`` for joint updates).
    """

    betas: np.ndarray
    losses: np.ndarray
    selected: np.ndarray
    grad_norms: np.ndarray
    terminated_by: str
    offset: float = 0.0
    numeric_error: bool = False

    @property
    def n_steps(self):
        return len(self.betas) - 1

    @property
    def final(self):
        return self.betas[-1]

    def to_csv(self, path):
        """Write the path as CSV: k, loss, selected_block, grad_norm, beta_1..beta_p."""
        p = self.betas.shape[1]
        header = ["k", "loss", "selected_block", "grad_norm"]
        header += [f"beta_{j + 1}" for j in range(p)]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for k in range(len(self.betas)):
                sel = "" if k == 0 else str(int(self.selected[k - 1]))
                row = [str(k), repr(float(self.losses[k])), sel,
                       repr(float(self.grad_norms[k]))]
                row += [repr(float(v)) for v in self.betas[k]]
                writer.writerow(row)


class _BlockSolver:
    """Cached solver for one base learner's penalized least-squares fit.

    The system matrix ``X^T X + lam P`` is fixed over a run, only the
    working response changes, so the factorization is computed once.
    Unpenalized blocks use an SVD with a machine-precision cutoff and
    return the min-norm solution when rank deficient.
    """

    def __init__(self, X, P=None, lam=0.0):
        self.X = X
        n, p = X.shape
        self.penalized = lam > 0.0 and P is not None and np.any(P != 0)
        if self.penalized:
            A = X.T @ X + lam * P
            try:
                self._chol = scipy.linalg.cho_factor(A)
            except scipy.linalg.LinAlgError as exc:
                raise np.linalg.LinAlgError(
                    f"singular penalized system (lam={lam:g}): {exc}"
                ) from exc
        else:
            U, s, Vt = np.linalg.svd(X, full_matrices=False)
            cutoff = max(n, p) * np.finfo(float).eps * (s[0] if s.size else 0.0)
            keep = s > cutoff
            self._U = U[:, keep]
            self._sinv = 1.0 / s[keep]
            self._V = Vt[keep].T

    def solve(self, y_tilde):
        """Coefficients of the block fitted against the working response."""
        if self.penalized:
            return scipy.linalg.cho_solve(self._chol, self.X.T @ y_tilde)
        return self._V @ (self._sinv * (self._U.T @ y_tilde))

    def solve_gram(self, g):
        """Apply the inverse system matrix to a gradient-sized vector."""
        if self.penalized:
            return scipy.linalg.cho_solve(self._chol, g)
        return self._V @ (self._sinv**2 * (self._V.T @ g))


def fit_block(block, y_tilde):
    """Fit one base learner against a working response.

    Solves ``(X^T X + lam P) beta = X^T y_tilde`` by a rank-revealing
    decomposition; rank-deficient unpenalized systems return the
    min-norm solution.

    Returns
    -------
    beta : ndarray
        Fitted block coefficients.
    sse : float
        Squared residual norm ``||y_tilde - X beta||^2``.
    """
    y_tilde = np.asarray(y_tilde, dtype=float)
    if y_tilde.shape != (block.n,):
        raise ValueError("working response length does not match the block")
    beta = _BlockSolver(block.X, block.P, block.lam).solve(y_tilde)
    resid = y_tilde - block.X @ beta
    return beta, float(resid @ resid)


def select_block(partition, y_tilde):
    """Index of the block whose fit leaves the smallest mean squared residual.

    Ties break to the lowest block id.
    """
    if partition.n_blocks == 0:
        raise ValueError("empty partition")
    sse = np.empty(partition.n_blocks)
    for b, block in enumerate(partition.blocks):
        _, sse[b] = fit_block(block, y_tilde)
    return int(np.argmin(sse / partition.n))


class _Stepper:
    """One boosting step at a time over a fixed partition.

    Owns the coefficient vector and the fitted values' linear part;
    shared by the main engine and the cyclic distributional driver.
    """

    def __init__(self, partition, config):
        self.partition = partition
        self.nu = config.nu
        self.mode = config.mode
        self.beta = np.zeros(partition.p)
        self.f_lin = np.zeros(partition.n)
        self._k = 0
        if config.mode == "joint":
            Pjoint = partition.penalty_blockdiag()
            self._joint = _BlockSolver(
                partition.X, Pjoint, 1.0 if np.any(Pjoint) else 0.0
            )
        else:
            self._solvers = [
                _BlockSolver(b.X, b.P, b.lam) for b in partition.blocks
            ]

    def step(self, y_tilde):
        """Advance one iteration; returns the updated block id."""
        part = self.partition
        if self.mode == "joint":
            inc = self._joint.solve(y_tilde)
            self.beta += self.nu * inc
            self.f_lin += self.nu * (part.X @ inc)
            self._k += 1
            return JOINT_SENTINEL
        if self.mode == "greedy":
            best, best_sse, best_inc = 0, np.inf, None
            for b, solver in enumerate(self._solvers):
                inc = solver.solve(y_tilde)
                resid = y_tilde - part.blocks[b].X @ inc
                sse = resid @ resid
                if sse < best_sse:
                    best, best_sse, best_inc = b, sse, inc
        else:  # cyclic
            best = self._k % part.n_blocks
            best_inc = self._solvers[best].solve(y_tilde)
        cols = part.column_map[best]
        self.beta[cols] += self.nu * best_inc
        self.f_lin += self.nu * (part.blocks[best].X @ best_inc)
        self._k += 1
        return best


def run_boost(partition, loss, y, config):
    """Run the boosting algorithm and record the full path.

    Parameters
    ----------
    partition : BlockPartition
        Base learners over a global design matrix.
    loss : LossSpec
        Loss family; the working response each step is its negative
        functional gradient at the current fit.
    y : array
        Outcome vector.
    config : BoostConfig

    Returns
    -------
    BoostPath
    """
    y = losses_mod.validate_outcome(loss, y)
    if y.shape != (partition.n,):
        raise ValueError("outcome length does not match the partition")
    offset = losses_mod.link_offset(loss, y) if config.init == "offset" else 0.0

    stepper = _Stepper(partition, config)
    X = partition.X
    betas = [stepper.beta.copy()]
    selected = []
    terminated = "max_iter"
    numeric_error = False

    ge = losses_mod.evaluate(loss, y, offset + stepper.f_lin)
    loss_vals = [ge.value]
    grad_norms = [float(np.linalg.norm(X.T @ ge.y_tilde))]

    for _ in range(config.max_iter):
        sel = stepper.step(ge.y_tilde)
        try:
            ge = losses_mod.evaluate(loss, y, offset + stepper.f_lin)
        except NumericError:
            if not config.divergence_guard:
                raise
            # roll the failed iterate back out of the record
            stepper.beta = betas[-1].copy()
            terminated = "divergence"
            numeric_error = True
            break
        betas.append(stepper.beta.copy())
        selected.append(sel)
        loss_vals.append(ge.value)
        grad_norms.append(float(np.linalg.norm(X.T @ ge.y_tilde)))
        if config.stop_tol > 0.0 and loss_vals[-2] - loss_vals[-1] < config.stop_tol:
            terminated = "tol"
            break
        if config.divergence_guard and _loss_grew(loss_vals[-1], loss_vals[0]):
            terminated = "divergence"
            break

    return BoostPath(
        betas=np.asarray(betas),
        losses=np.asarray(loss_vals),
        selected=np.asarray(selected, dtype=int),
        grad_norms=np.asarray(grad_norms),
        terminated_by=terminated,
        offset=offset,
        numeric_error=numeric_error,
    )


@dataclass
class SmootherPath:
    """Fitted-value path of boosting with linear smoothers."""

    fitted: np.ndarray
    selected: np.ndarray
    residual_norms: np.ndarray
    contraction: float  # largest eigenvalue over all (I - S_m)

    @property
    def n_steps(self):
        return len(self.fitted) - 1


def smoother_boost(smoothers, y, config, selection=None, seed=0):
    """Boost with generic full-rank linear smoothers toward the perfect fit.

    Each step applies the update ``f <- f + S_m (y - f)`` for one
    smoother. Every smoother must be symmetric with eigenvalues in
    (0, 1]; the residual then contracts at least geometrically with
    factor ``max_m lambda_max(I - S_m)`` regardless of how the smoother
    is selected.

    Parameters
    ----------
    smoothers : sequence of ndarray
        Symmetric n-by-n matrices with eigenvalues in (0, 1].
    y : array
        Target vector.
    config : BoostConfig
        Supplies the iteration count and, through ``mode``, the default
        selection rule.
    selection : str, optional
        ``'greedy'`` (largest residual reduction), ``'cyclic'`` or
        ``'random'``; defaults to ``config.mode``.
    seed : int
        Seed for the random selection rule.
    """
    y = np.asarray(y, dtype=float)
    rule = selection if selection is not None else config.mode
    if rule not in ("greedy", "cyclic", "random"):
        raise ValueError(f"unsupported smoother selection rule {rule!r}")
    smoothers = [np.asarray(S, dtype=float) for S in smoothers]
    if not smoothers:
        raise ValueError("need at least one smoother")
    tol = 1e-10
    contraction = 0.0
    for m, S in enumerate(smoothers):
        if S.shape != (y.size, y.size):
            raise ValueError(f"smoother {m} has shape {S.shape}")
        if not np.allclose(S, S.T, atol=1e-10 * (1.0 + np.abs(S).max())):
            raise ValueError(f"smoother {m} is not symmetric")
        w = np.linalg.eigvalsh(S)
        if w[0] <= tol or w[-1] > 1.0 + tol:
            raise ValueError(
                f"smoother {m} has eigenvalues in [{w[0]:.3e}, {w[-1]:.3e}], "
                "required inside (0, 1]"
            )
        contraction = max(contraction, 1.0 - w[0])

    rng = np.random.default_rng(seed)
    f = np.zeros_like(y)
    fitted = [f.copy()]
    selected = []
    res_norms = [float(np.linalg.norm(y))]
    for k in range(config.max_iter):
        r = y - f
        if rule == "greedy":
            norms = [np.linalg.norm(r - S @ r) for S in smoothers]
            m = int(np.argmin(norms))
        elif rule == "cyclic":
            m = k % len(smoothers)
        else:
            m = int(rng.integers(len(smoothers)))
        f = f + smoothers[m] @ r
        fitted.append(f.copy())
        selected.append(m)
        res_norms.append(float(np.linalg.norm(y - f)))
    return SmootherPath(
        fitted=np.asarray(fitted),
        selected=np.asarray(selected, dtype=int),
        residual_norms=np.asarray(res_norms),
        contraction=contraction,
    )


def divergence_detector(path, window=10):
    """Classify the tail behavior of a boosting path.

    Returns ``'diverging'`` if the loss grew by more than a factor of 10
    over the window or a numeric error occurred, ``'oscillating'`` if
    some coefficient's updates alternate sign with comparable
    non-vanishing magnitudes over the window, else ``'converging'``.
    """
    if window < 2:
        raise ValueError("window must be at least 2")
    if path.numeric_error:
        return "diverging"
    L = path.losses
    w = min(window, len(L) - 1)
    if w < 1:
        return "converging"
    if _loss_grew(L[-1], L[-1 - w]):
        return "diverging"

    deltas = np.diff(path.betas[-(w + 1):], axis=0)
    scale = 1.0 + np.abs(path.betas[-1]).max()
    floor = 1e-12 * scale
    for j in range(deltas.shape[1]):
        d = deltas[:, j]
        d = d[np.abs(d) > floor]
        if d.size < 3:
            continue
        signs_alternate = np.all(d[1:] * d[:-1] < 0)
        ratios = np.abs(d[1:]) / np.abs(d[:-1])
        if signs_alternate and np.all((ratios >= 0.5) & (ratios <= 2.0)):
            return "oscillating"
    return "converging"
