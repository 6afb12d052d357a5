"""Dense bounded-variable primal simplex for small LPs.

Solves ``max c.z  s.t.  A z <= b,  0 <= z <= upper``.  Variable bounds are
handled implicitly (nonbasic variables sit at either bound), so the basis has
only ``len(b)`` rows even with thousands of box constraints.  The slack basis
with the structural variables at the bounds selected by ``start_at_upper``
must be primal feasible.

Pricing is Dantzig's largest reduced cost.  After a run of degenerate pivots
the solver switches to Bland's lowest-index rule for the rest of the solve,
which rules out cycling.
"""
from __future__ import annotations

import numpy as np

from .errors import SolverError

AT_LOWER, AT_UPPER, BASIC = 0, 1, 2
DEGENERATE_STREAK = 30


def bounded_simplex(c, a, b, upper, start_at_upper=None, tol=1e-9, max_iter=None, duals=False):
    """Return ``(z, objective)`` at an optimal vertex, plus the row duals if ``duals``."""
    c = np.asarray(c, float)
    a = np.atleast_2d(np.asarray(a, float))
    b = np.asarray(b, float)
    upper = np.asarray(upper, float)
    n_rows, n_vars = a.shape
    if np.any(upper < 0):
        raise ValueError("upper bounds must be non-negative")

    mat = np.hstack([a, np.eye(n_rows)])
    cost = np.concatenate([c, np.zeros(n_rows)])
    ub = np.concatenate([upper, np.full(n_rows, np.inf)])
    n_tot = n_vars + n_rows
    status = np.full(n_tot, AT_LOWER)
    x = np.zeros(n_tot)
    if start_at_upper is not None:
        mask = np.asarray(start_at_upper, bool)
        if np.any(mask & ~np.isfinite(upper)):
            raise ValueError("cannot start an unbounded variable at its upper bound")
        status[:n_vars][mask] = AT_UPPER
        x[:n_vars][mask] = upper[mask]
    basis = list(range(n_vars, n_tot))
    status[basis] = BASIC
    x[basis] = b - a @ x[:n_vars]
    scale = max(1.0, float(np.max(np.abs(mat))))
    if np.any(x[basis] < -tol * scale):
        raise ValueError("starting basis is infeasible")
    x[basis] = np.maximum(x[basis], 0.0)
    if max_iter is None:
        max_iter = 50 * n_tot + 1000

    binv = np.eye(n_rows)
    bland = False
    streak = 0
    it = 0
    while it < max_iter:
        y = cost[basis] @ binv
        reduced = cost - y @ mat
        eligible = ((status == AT_LOWER) & (reduced > tol * scale)) | (
            (status == AT_UPPER) & (reduced < -tol * scale)
        )
        cand = np.flatnonzero(eligible)
        if cand.size == 0:
            if duals:
                return x[:n_vars].copy(), float(cost @ x), y
            return x[:n_vars].copy(), float(cost @ x)
        if not bland:
            cand = cand[np.argsort(-np.abs(reduced[cand]), kind="stable")]
        # Bound flips keep the basis, hence the reduced costs; walk the
        # candidate list until a basis change happens.
        alphas = binv @ mat[:, cand]
        order = sorted(range(n_rows), key=lambda r: basis[r])
        basic_ub = ub[basis]
        for pos, j in enumerate(cand):
            it += 1
            sigma = 1.0 if status[j] == AT_LOWER else -1.0
            alpha = sigma * alphas[:, pos]
            xb = x[basis]
            theta = ub[j]
            leave = None
            to_upper = False
            for r in order:
                if alpha[r] > tol:
                    ratio = max(xb[r], 0.0) / alpha[r]
                    hits_upper = False
                elif alpha[r] < -tol and np.isfinite(basic_ub[r]):
                    ratio = max(basic_ub[r] - xb[r], 0.0) / -alpha[r]
                    hits_upper = True
                else:
                    continue
                if ratio < theta:
                    theta, leave, to_upper = ratio, r, hits_upper
            if not np.isfinite(theta):
                raise SolverError(f"LP unbounded along column {j} at iteration {it}")
            x[basis] = xb - theta * alpha
            if leave is None:
                status[j] = AT_UPPER if sigma > 0 else AT_LOWER
                x[j] = ub[j] if sigma > 0 else 0.0
                continue
            streak = streak + 1 if theta <= tol else 0
            if streak >= DEGENERATE_STREAK:
                bland = True
            x[j] += sigma * theta
            out = basis[leave]
            status[out] = AT_UPPER if to_upper else AT_LOWER
            x[out] = ub[out] if to_upper else 0.0
            basis[leave] = int(j)
            status[j] = BASIC
            binv = np.linalg.inv(mat[:, basis])
            at_upper = status == AT_UPPER
            x[basis] = binv @ (b - mat[:, at_upper] @ ub[at_upper])
            break
    raise SolverError(
        f"simplex did not converge in {max_iter} iterations; basis={basis}, "
        f"objective={float(cost @ x):.12g}, bland={bland}"
    )
