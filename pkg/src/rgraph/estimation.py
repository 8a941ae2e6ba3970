"""Fitting the models to an observed graph.

* :func:`fit_additive_ls` -- least-squares estimates for the additive model;
* :func:`fit_beta_mle` -- degree-matching maximum likelihood for beta;
* :func:`fit_kbeta_given_labels` -- k-beta ML when the colors are known;
* :func:`anova_score` / :func:`greedy_coloring` -- the ANOVA objective
  ``Q(C)`` and a restarted local search over colorings;
* :func:`fit_rank_ml` -- small-odds-rank ML by quasi-Newton ascent in
  log-parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import _coloring
from ._parallel import map_ordered
from .errors import ConvergenceError, MLENonexistenceError, ValidationError
from .graph import Graph
from .models import (
    AdditiveParams,
    BetaParams,
    KBetaParams,
    Labeling,
    RankParams,
    probability_matrix,
)

__all__ = [
    "FitResult",
    "ColoringResult",
    "fit_additive_ls",
    "fit_beta_mle",
    "solve_beta",
    "solve_bipartite",
    "fit_kbeta_given_labels",
    "anova_score",
    "greedy_coloring",
    "fit_rank_ml",
    "rank_loglik",
    "rank_gradient",
    "loglik",
    "additive_ssq",
    "expected_degrees",
]

BETA_TOL = 1e-10
BETA_MAX_ITER = 10_000
BETA_DAMPING = 0.5
DIVERGENCE_BOUND = 1e12


@dataclass
class FitResult:
    params: object
    converged: bool
    iterations: int
    objective: float
    warnings: list = field(default_factory=list)
    trace: list = field(default_factory=list, repr=False)

    def report(self) -> dict:
        """Sidecar report accompanying the parameter JSON."""
        return {
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "objective": float(self.objective),
            "warnings": list(self.warnings),
        }


@dataclass
class ColoringResult:
    labeling: Labeling
    q: float
    restarts_used: int
    per_restart_q: list
    per_restart_labelings: list = field(default_factory=list, repr=False)


# -- objectives ----------------------------------------------------------------

def loglik(g: Graph, pm) -> float:
    """Bernoulli log-likelihood of ``g`` over pairs ``i < j``."""
    pm = np.asarray(pm, dtype=float)
    iu = np.triu_indices(g.n, 1)
    p = pm[iu]
    eps = g.adjacency[iu]
    return float(np.sum(np.where(eps, np.log(p), np.log1p(-p))))


def additive_ssq(g: Graph, params: AdditiveParams) -> float:
    iu = np.triu_indices(g.n, 1)
    fitted = params.p + params.effects[iu[0]] + params.effects[iu[1]]
    return float(np.sum((g.adjacency[iu] - fitted) ** 2))


def expected_degrees(pm) -> np.ndarray:
    pm = np.asarray(pm, dtype=float)
    return pm.sum(axis=1) - pm.diagonal()


# -- additive model ----------------------------------------------------------------

def fit_additive_ls(g: Graph) -> FitResult:
    """Mean edge indicator for ``p``; mean deviation of each row for ``p_i``."""
    n = g.n
    if n < 3:
        raise ValidationError("additive model needs n >= 3")
    deg = g.degrees().astype(float)
    p_hat = deg.sum() / (n * (n - 1))
    effects = deg / (n - 1) - p_hat
    effects = effects - effects.mean()
    params = AdditiveParams(p_hat, effects, strict=False)
    notes = []
    bad = params.out_of_range_pairs()
    if bad:
        notes.append(f"{len(bad)} fitted pair probabilities fall outside (0, 1)")
    return FitResult(params, True, 1, additive_ssq(g, params), notes)


# -- beta model ----------------------------------------------------------------

def _boundary_check(d, full, what="vertex"):
    d = np.asarray(d)
    bad = np.flatnonzero((d <= 0) | (d >= full))
    if bad.size:
        raise MLENonexistenceError(
            f"MLE does not exist: {what}(s) {bad.tolist()} have degree 0 or the maximum {full}",
            bad.tolist(),
        )


def solve_beta(d, tol=BETA_TOL, max_iter=BETA_MAX_ITER, damping=BETA_DAMPING):
    """Solve ``sum_{j != i} b_i b_j / (1 + b_i b_j) = d_i`` for ``b > 0``.

    Damped fixed point ``b_i <- d_i / sum_{j != i} b_j / (1 + b_i b_j)``,
    averaged in log space. Returns ``(b, iterations)``.
    """
    d = np.asarray(d, dtype=float)
    N = d.size
    _boundary_check(d, N - 1)
    b = d / np.sqrt(d.sum())
    for it in range(1, max_iter + 1):
        bb = np.outer(b, b)
        terms = b[None, :] / (1.0 + bb)
        np.fill_diagonal(terms, 0.0)
        phi = d / terms.sum(axis=1)
        b_new = np.exp((1 - damping) * np.log(b) + damping * np.log(phi))
        if not np.all(np.isfinite(b_new)) or b_new.max() > DIVERGENCE_BOUND or b_new.min() < 1 / DIVERGENCE_BOUND:
            big = np.flatnonzero(~np.isfinite(b_new) | (b_new > DIVERGENCE_BOUND) | (b_new < 1 / DIVERGENCE_BOUND))
            raise MLENonexistenceError(
                f"MLE does not exist: parameters of vertices {big.tolist()} diverge", big.tolist()
            )
        change = np.max(np.abs(b_new - b))
        b = b_new
        if change < tol:
            return b, it
    raise ConvergenceError(
        f"beta fixed point did not converge in {max_iter} iterations", last=b, iterations=max_iter,
        residual=float(change),
    )


def fit_beta_mle(g: Graph, tol=BETA_TOL, max_iter=BETA_MAX_ITER) -> FitResult:
    """ML fit of the beta model; depends on ``g`` only through its degrees."""
    if g.n < 3:
        raise ValidationError("beta model fit needs n >= 3")
    beta, iterations = solve_beta(g.degrees(), tol, max_iter)
    params = BetaParams(beta)
    return FitResult(params, True, iterations, loglik(g, probability_matrix(params)))


def solve_bipartite(dr, dc, tol=BETA_TOL, max_iter=BETA_MAX_ITER, damping=BETA_DAMPING):
    """Rasch-type degree matching between two disjoint vertex sets.

    Finds ``x`` (rows) and ``y`` (columns) with row sums ``dr`` and column
    sums ``dc`` of ``x_i y_j / (1 + x_i y_j)``. The scale ``(t x, y / t)``
    is fixed by equal geometric means. Returns ``(x, y, iterations)``.
    """
    dr = np.asarray(dr, dtype=float)
    dc = np.asarray(dc, dtype=float)
    R, C = dr.size, dc.size
    _boundary_check(dr, C, "row vertex")
    _boundary_check(dc, R, "column vertex")
    total = dr.sum()
    x = dr / np.sqrt(total)
    y = dc / np.sqrt(total)
    for it in range(1, max_iter + 1):
        xy = np.outer(x, y)
        denom = 1.0 + xy
        phi_x = dr / (y[None, :] / denom).sum(axis=1)
        phi_y = dc / (x[:, None] / denom).sum(axis=0)
        x_new = np.exp((1 - damping) * np.log(x) + damping * np.log(phi_x))
        y_new = np.exp((1 - damping) * np.log(y) + damping * np.log(phi_y))
        shift = np.exp((np.log(y_new).mean() - np.log(x_new).mean()) / 2)
        x_new, y_new = x_new * shift, y_new / shift
        both = np.concatenate([x_new, y_new])
        if not np.all(np.isfinite(both)) or both.max() > DIVERGENCE_BOUND or both.min() < 1 / DIVERGENCE_BOUND:
            raise MLENonexistenceError("MLE does not exist: bipartite block parameters diverge")
        change = max(np.max(np.abs(x_new - x)), np.max(np.abs(y_new - y)))
        x, y = x_new, y_new
        if change < tol:
            return x, y, it
    raise ConvergenceError(
        f"bipartite fixed point did not converge in {max_iter} iterations",
        last=(x, y), iterations=max_iter, residual=float(change),
    )


# -- k-beta model ----------------------------------------------------------------

def _color_degrees(g: Graph, labeling: Labeling):
    onehot = np.eye(labeling.k, dtype=np.int64)[labeling.index]
    return g.adjacency.astype(np.int64) @ onehot


def fit_kbeta_given_labels(g: Graph, labeling: Labeling, tol=BETA_TOL,
                           max_iter=BETA_MAX_ITER) -> FitResult:
    """ML fit of ``b`` for fixed colors.

    The likelihood splits over color pairs: each class is a beta problem on
    its induced subgraph, each pair of classes a bipartite problem, and the
    solution matches every vertex's degree into every color class.
    """
    if labeling.n != g.n:
        raise ValidationError(f"labeling has {labeling.n} entries for {g.n} vertices")
    labeling.check_nondegenerate()
    k = labeling.k
    c = labeling.index
    D = _color_degrees(g, labeling)
    members = [np.flatnonzero(c == s) for s in range(k)]
    b = np.ones((g.n, k))
    iterations = 0
    for s in range(k):
        idx = members[s]
        if idx.size < 2:
            continue
        try:
            bs, it = solve_beta(D[idx, s], tol, max_iter)
        except MLENonexistenceError as exc:
            where = [(int(idx[v]), s + 1) for v in exc.vertices]
            raise MLENonexistenceError(
                f"MLE does not exist: (vertex, color) {where} at the within-class boundary",
                [w[0] for w in where],
            ) from None
        b[idx, s] = bs
        iterations = max(iterations, it)
    for s in range(k):
        for t in range(s + 1, k):
            rows, cols = members[s], members[t]
            try:
                x, y, it = solve_bipartite(D[rows, t], D[cols, s], tol, max_iter)
            except MLENonexistenceError:
                _boundary_pairs(D, rows, cols, s, t)
                raise
            b[rows, t] = x
            b[cols, s] = y
            iterations = max(iterations, it)
    params = KBetaParams(b, labeling)
    return FitResult(params, True, iterations, loglik(g, probability_matrix(params)))


def _boundary_pairs(D, rows, cols, s, t):
    where = [(int(i), t + 1) for i in rows if D[i, t] in (0, cols.size)]
    where += [(int(j), s + 1) for j in cols if D[j, s] in (0, rows.size)]
    if where:
        raise MLENonexistenceError(
            f"MLE does not exist: (vertex, color) {where} at the between-class boundary",
            [w[0] for w in where],
        )


# -- ANOVA coloring ----------------------------------------------------------------

def anova_score(g: Graph, labeling: Labeling):
    """Sum over pairs ``i < j`` of squared residuals of
    ``eps(i, j) - u(c_i, c_j) - v(i, c_j) - v(j, c_i)``.

    ``u`` holds the cell means of the color-pair blocks (pairs ``i != j``),
    ``v(i, t)`` the mean deviation of row ``i`` inside color ``t``. Returns
    ``(q, u, v)``; cells without pairs get ``u = 0``, rows without partners
    ``v = 0``.
    """
    if labeling.n != g.n:
        raise ValidationError(f"labeling has {labeling.n} entries for {g.n} vertices")
    labeling.check_nondegenerate()
    k = labeling.k
    c = labeling.index
    A = g.adjacency.astype(float)
    H = np.eye(k)[c]
    sizes = H.sum(axis=0)
    pair_counts = np.outer(sizes, sizes) - np.diag(sizes)
    sums = H.T @ A @ H
    u = np.divide(sums, pair_counts, out=np.zeros((k, k)), where=pair_counts > 0)
    partners = sizes[None, :] - H
    row_sums = A @ H
    v = np.divide(row_sums, partners, out=np.zeros_like(row_sums), where=partners > 0)
    v = np.where(partners > 0, v - u[c], 0.0)
    fitted = u[c][:, c] + v[:, c] + v[:, c].T
    iu = np.triu_indices(g.n, 1)
    q = float(np.sum((A[iu] - fitted[iu]) ** 2))
    return q, u, v


class _ColoringState:
    def __init__(self, g: Graph, labels_index, k):
        A = g.adjacency
        self.indptr = np.concatenate([[0], np.cumsum(A.sum(axis=1))]).astype(np.int64)
        self.indices = np.nonzero(A)[1].astype(np.int64)
        self.lab = np.array(labels_index, dtype=np.int64)
        self.k = k
        self.D, self.E, self.S2, self.sizes = _coloring.build_stats(
            self.indptr, self.indices, self.lab, k
        )

    def q(self):
        return float(_coloring.q_from_stats(self.S2, self.E, self.sizes))

    def args(self):
        return (self.indptr, self.indices, self.lab, self.D, self.E, self.S2, self.sizes)


RTOL = 1e-12


def _random_labels(rng, n, k):
    while True:
        lab = rng.integers(0, k, size=n)
        if np.bincount(lab, minlength=k).min() > 0:
            return lab


def _descend(g: Graph, k, rng, history=None, max_rounds=100_000):
    """Local search from a uniform random coloring to a local minimum."""
    n = g.n
    st = _ColoringState(g, _random_labels(rng, n, k), k)
    q = st.q()
    if history is not None:
        history.append(q)
    for _ in range(max_rounds):
        accepted, q = _coloring.single_sweep(
            *st.args(), rng.permutation(n), rng.integers(0, max(k - 1, 1), size=n), q, RTOL
        )
        if accepted:
            q = st.q()
            if history is not None:
                history.append(q)
            continue
        found, q = _coloring.pair_scan(*st.args(), rng.permutation(n), q, RTOL)
        if not found:
            break
        q = st.q()
        if history is not None:
            history.append(q)
    return st.lab.copy(), st.q()


def greedy_coloring(g: Graph, k: int, restarts: int = 20, seed=None) -> ColoringResult:
    """Minimize ``Q(C)`` by first-improvement local search from random starts.

    Moves are single-vertex recolorings; when none improves, label exchanges
    between two vertices are tried. Each restart has its own RNG stream
    spawned from ``seed``; the best local minimum is returned with colors
    renamed by first appearance.
    """
    k = int(k)
    restarts = int(restarts)
    if k < 1:
        raise ValidationError("k must be at least 1")
    if restarts < 1:
        raise ValidationError("restarts must be at least 1")
    if g.n < 2 * k:
        raise ValidationError(f"need n >= 2k vertices (n={g.n}, k={k})")
    if k == 1:
        lab = Labeling(np.ones(g.n, dtype=np.int64), 1)
        q = anova_score(g, lab)[0]
        return ColoringResult(lab, q, 1, [q], [lab])
    streams = np.random.SeedSequence(seed).spawn(restarts)
    runs = map_ordered(lambda ss: _descend(g, k, np.random.default_rng(ss)), streams)
    labelings = [Labeling.from_index(lab, k).canonical() for lab, _ in runs]
    qs = [anova_score(g, lab)[0] for lab in labelings]
    best = int(np.argmin(qs))
    return ColoringResult(labelings[best], qs[best], restarts, qs, labelings)


# -- small-odds-rank model ----------------------------------------------------------------

def _rank_odds(b):
    r = b @ b.T
    # diagonal is outside the model; 1.0 keeps the logs finite
    np.fill_diagonal(r, 1.0)
    return r


def rank_loglik(g: Graph, b) -> float:
    """Log-likelihood of the small-odds-rank model at positive ``b``."""
    b = np.asarray(b, dtype=float)
    eps = g.adjacency
    r = _rank_odds(b)
    iu = np.triu_indices(g.n, 1)
    rv = r[iu]
    return float(np.sum(np.where(eps[iu], np.log(rv), 0.0) - np.log1p(rv)))


def rank_gradient(g: Graph, b) -> np.ndarray:
    """Gradient of :func:`rank_loglik` with respect to ``log b``."""
    b = np.asarray(b, dtype=float)
    eps = g.adjacency.astype(float)
    r = _rank_odds(b)
    # d/dr [eps log r - log(1 + r)] = (eps - p) / r
    w = (eps - r / (1.0 + r)) / r
    np.fill_diagonal(w, 0.0)
    return b * (w @ b)


LOG_B_BOUND = 30.0


def _projected_norm(theta, grad):
    """Norm of the ascent gradient with outward components at the box removed."""
    g = grad.copy()
    g[(theta <= -LOG_B_BOUND) & (g < 0)] = 0.0
    g[(theta >= LOG_B_BOUND) & (g > 0)] = 0.0
    return float(np.linalg.norm(g))


def fit_rank_ml(g: Graph, k: int, seed=None, gtol=1e-6, max_iter=20_000) -> FitResult:
    """Local ML fit of the small-odds-rank model.

    Box-constrained L-BFGS ascent on ``log b`` (``|log b| <= 30``, so columns
    the data do not need can shrink to ~1e-13 without underflow), started
    from ``b = sqrt(2 density / k)`` jittered by ``exp(0.1 N(0, 1))``.
    Converged when the projected gradient norm is below ``gtol``.
    """
    k = int(k)
    if k < 1:
        raise ValidationError("k must be at least 1")
    n = g.n
    if n < 3:
        raise ValidationError("rank model fit needs n >= 3")
    rng = np.random.default_rng(seed)
    density = max(g.m / (n * (n - 1) / 2), 1e-3)
    theta0 = np.log(np.sqrt(2 * density / k)) + 0.1 * rng.standard_normal((n, k))
    bounds = [(-LOG_B_BOUND, LOG_B_BOUND)] * (n * k)

    def neg(theta):
        b = np.exp(theta.reshape(n, k))
        return -rank_loglik(g, b), -rank_gradient(g, b).ravel()

    def pnorm(theta):
        return _projected_norm(theta, rank_gradient(g, np.exp(theta.reshape(n, k))).ravel())

    trace = []
    res = optimize.minimize(
        neg, theta0.ravel(), jac=True, method="L-BFGS-B", bounds=bounds,
        callback=lambda th: trace.append(-neg(th)[0]),
        options={"maxiter": max_iter, "maxfun": 2 * max_iter, "gtol": gtol / 10,
                 "ftol": 1e-15, "maxcor": 20},
    )
    theta = res.x
    gnorm = pnorm(theta)
    if gnorm >= gtol:
        # restarting drops stale curvature pairs
        for _ in range(20):
            res = optimize.minimize(
                neg, theta, jac=True, method="L-BFGS-B", bounds=bounds,
                callback=lambda th: trace.append(-neg(th)[0]),
                options={"maxiter": max_iter, "gtol": gtol / 100, "ftol": 0.0, "maxcor": 30},
            )
            theta = res.x
            gnorm = pnorm(theta)
            if gnorm < gtol:
                break
    b = np.exp(theta.reshape(n, k))
    if gnorm >= gtol:
        raise ConvergenceError(
            f"rank-model ascent stopped with gradient norm {gnorm:.3g}",
            last=b, iterations=len(trace), residual=gnorm,
        )
    return FitResult(RankParams(b), True, len(trace), rank_loglik(g, b), trace=trace)
