"""Nelder-Mead simplex minimization with a relative-spread stopping rule.

Classic reflect / expand / contract / shrink moves with the standard
coefficients (1, 2, 0.5, 0.5).  Termination is controlled by the relative
spread of the simplex function values,

    (f_worst - f_best) / max(1, |f_best|) < tol,

or by an evaluation budget; hitting the budget is reported through the
``converged`` flag rather than raised, because a capped run can still be
the best candidate of a multi-start search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["OptimizeResult", "nelder_mead"]


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    n_evals: int
    converged: bool


def _spread(f_best: float, f_worst: float) -> float:
    return (f_worst - f_best) / max(1.0, abs(f_best))


def nelder_mead(
    fn,
    x0,
    step: float = 0.25,
    tol: float = 1e-9,
    max_evals: int = 50_000,
) -> OptimizeResult:
    """Minimize ``fn`` starting from ``x0``.

    Parameters
    ----------
    fn : callable
        Objective mapping a 1-d float array to a float.  May return
        +inf / large penalties for unusable points.
    x0 : array_like
        Starting point; the initial simplex offsets each coordinate by
        ``step`` (absolute, since the callers work in log/logit space).
    step : float
        Initial simplex edge length.
    tol : float
        Relative function-value spread at which to declare convergence.
    max_evals : int
        Hard cap on objective evaluations.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    sim = np.empty((n + 1, n))
    sim[0] = x0
    for i in range(n):
        sim[i + 1] = x0
        sim[i + 1, i] += step

    fsim = np.empty(n + 1)
    n_evals = 0
    for i in range(n + 1):
        fsim[i] = fn(sim[i])
        n_evals += 1

    order = np.argsort(fsim, kind="stable")
    sim, fsim = sim[order], fsim[order]

    while n_evals < max_evals:
        if _spread(fsim[0], fsim[-1]) < tol:
            return OptimizeResult(sim[0].copy(), float(fsim[0]), n_evals, True)

        centroid = sim[:-1].mean(axis=0)
        xr = centroid + (centroid - sim[-1])
        fr = fn(xr)
        n_evals += 1

        if fr < fsim[0]:
            xe = centroid + 2.0 * (centroid - sim[-1])
            fe = fn(xe)
            n_evals += 1
            if fe < fr:
                sim[-1], fsim[-1] = xe, fe
            else:
                sim[-1], fsim[-1] = xr, fr
        elif fr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fr
        else:
            if fr < fsim[-1]:  # outside contraction
                xc = centroid + 0.5 * (xr - centroid)
            else:  # inside contraction
                xc = centroid - 0.5 * (centroid - sim[-1])
            fc = fn(xc)
            n_evals += 1
            if fc < min(fr, fsim[-1]):
                sim[-1], fsim[-1] = xc, fc
            else:  # shrink toward the best vertex
                for i in range(1, n + 1):
                    sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
                    fsim[i] = fn(sim[i])
                    n_evals += 1

        order = np.argsort(fsim, kind="stable")
        sim, fsim = sim[order], fsim[order]

    return OptimizeResult(sim[0].copy(), float(fsim[0]), n_evals, False)
