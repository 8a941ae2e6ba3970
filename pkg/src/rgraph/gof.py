"""Goodness-of-fit tests for edge-independent graph models.

Three routes:

``uniform_transform`` + ``ks_uniform_test``
    Randomize each pair indicator into a number that is exactly uniform on
    (0, 1) when the model is right, then test uniformity.
``blocked_sums_test``
    Order pairs by fitted probability, cut them into blocks and compare
    observed and expected edge counts per block.
``mc_degree_test``
    Condition on the degree sequence and compare a graph statistic with its
    distribution over uniformly drawn graphs having the same degrees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from . import fixed_degree
from ._parallel import map_ordered
from .errors import FrozenChainError, UnstableGroupError, ValidationError
from .graph import Graph

__all__ = [
    "TestReport",
    "uniform_transform",
    "ks_statistic",
    "ks_uniform_test",
    "blocked_sums_test",
    "mc_degree_test",
    "mc_degree_tests",
    "monte_carlo_pvalue",
    "STATISTICS",
    "statistic_function",
    "DEFAULT_BLOCKS",
    "DEFAULT_REPLICATES",
]

DEFAULT_BLOCKS = 10
DEFAULT_REPLICATES = 199
MIN_REPLICATES = 19


@dataclass(frozen=True)
class TestReport:
    """Outcome of one test.

    ``null_sample`` holds the Monte Carlo statistics for simulated tests and
    the name of the reference distribution for analytic ones.
    """

    __test__ = False  # keep pytest from collecting this class

    test: str
    statistic: float
    p_value: float
    replicates: int
    seed: int | None
    null_sample: object

    def to_dict(self):
        null = self.null_sample
        if not isinstance(null, str):
            null = [float(x) for x in null]
        return {
            "test": self.test,
            "statistic": float(self.statistic),
            "p_value": float(self.p_value),
            "replicates": int(self.replicates),
            "seed": self.seed,
            "null_sample": null,
        }


def _resolve_seed(seed):
    """An integer seed to record, drawing fresh entropy when ``seed`` is None."""
    if seed is None:
        return int(np.random.SeedSequence().entropy % (1 << 64))
    seed = int(seed)
    if seed < 0:
        raise ValidationError("seed must be non-negative")
    return seed


# -- randomized uniform transform --------------------------------------------

def uniform_transform(eps, p, seed=None, u=None):
    """Map indicators ``eps`` with success probabilities ``p`` to (0, 1).

    An edge lands uniformly in ``(0, p_i)`` and a non-edge uniformly in
    ``(p_i, 1)``; if ``eps_i ~ Bernoulli(p_i)`` the result is uniform. ``u``
    overrides the internally drawn uniforms.
    """
    eps = np.asarray(eps)
    p = np.asarray(p, dtype=float)
    if eps.shape != p.shape or eps.ndim != 1:
        raise ValidationError("eps and p must be 1-d arrays of equal length")
    if not np.all((eps == 0) | (eps == 1)):
        raise ValidationError("eps must contain only 0 and 1")
    if not np.all((p > 0) & (p < 1)):
        raise ValidationError("probabilities must lie strictly inside (0, 1)")
    if u is None:
        u = np.random.default_rng(seed).random(p.shape[0])
    else:
        u = np.asarray(u, dtype=float)
        if u.shape != p.shape:
            raise ValidationError("u must match p in length")
    e = eps.astype(bool)
    return np.where(e, p * u, p + (1.0 - p) * u)


def ks_statistic(x) -> float:
    """Sup distance between the empirical CDF of ``x`` and the uniform CDF."""
    x = np.sort(np.asarray(x, dtype=float))
    n = x.shape[0]
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))


def ks_uniform_test(x) -> TestReport:
    """One-sample Kolmogorov-Smirnov test against uniform(0, 1).

    The p-value is the Kolmogorov limit law evaluated at ``sqrt(n) D``.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise ValidationError("KS test needs at least one value")
    if np.any(~np.isfinite(x)) or np.any((x < 0) | (x > 1)):
        raise ValidationError("KS input must lie in [0, 1]")
    d = ks_statistic(x)
    p = float(sps.kstwobign.sf(math.sqrt(x.size) * d))
    return TestReport("ks-uniform", d, min(1.0, max(0.0, p)), 0, None, "kolmogorov")


# -- partial sums over probability-ordered blocks -----------------------------

def blocked_sums_test(g: Graph, pm, blocks: int = DEFAULT_BLOCKS) -> TestReport:
    """Chi-square test of observed vs expected edges in probability blocks.

    Pairs are sorted by fitted probability (ties by upper-triangle index),
    split into ``blocks`` contiguous groups, and each group contributes
    ``z_b^2`` with ``z_b`` its standardized edge-count excess. The reference
    law is chi-square with ``blocks`` degrees of freedom, which ignores the
    fitted parameters and is therefore approximate.
    """
    pm = np.asarray(pm, dtype=float)
    n = g.n
    blocks = int(blocks)
    if pm.shape != (n, n):
        raise ValidationError(f"probability matrix must be {n}x{n}")
    if blocks < 2:
        raise ValidationError("need at least two blocks")
    iu = np.triu_indices(n, 1)
    if iu[0].size < 10 * blocks:
        raise ValidationError(
            f"{iu[0].size} vertex pairs is too few for {blocks} blocks (need 10 per block)"
        )
    p = pm[iu]
    if np.any(~np.isfinite(p)) or np.any((p < 0) | (p > 1)):
        raise ValidationError("probabilities must lie in [0, 1]")
    eps = g.adjacency[iu].astype(float)
    order = np.argsort(p, kind="stable")
    z = np.empty(blocks)
    for b, idx in enumerate(np.array_split(order, blocks)):
        pb = p[idx]
        var = float(np.sum(pb * (1.0 - pb)))
        if var < 1.0:
            raise UnstableGroupError(
                f"block {b} has variance {var:.3g} < 1; use fewer blocks"
            )
        z[b] = (float(np.sum(eps[idx])) - float(np.sum(pb))) / math.sqrt(var)
    t = float(np.sum(z * z))
    pval = float(sps.chi2.sf(t, blocks))
    return TestReport("blocked-sums", t, min(1.0, max(0.0, pval)), 0, None, f"chi2({blocks})")


# -- statistics for the conditional test -------------------------------------

def _eig_sorted(adj):
    lam = np.linalg.eigvalsh(np.asarray(adj, dtype=float))
    return lam[np.argsort(-np.abs(lam), kind="stable")]


def second_eigenvalue_abs(adj) -> float:
    lam = _eig_sorted(adj)
    return float(abs(lam[1])) if lam.shape[0] > 1 else 0.0


def max_eigenvalue(adj) -> float:
    return float(np.linalg.eigvalsh(np.asarray(adj, dtype=float))[-1])


def triangle_count(adj) -> float:
    A = np.asarray(adj, dtype=float)
    return float(round(np.sum((A @ A) * A) / 6.0))


def meta_degree_stat(adj) -> float:
    return float(fixed_degree._meta_degree_dense(np.asarray(adj, dtype=bool)))


STATISTICS = {
    "second-largest-eigenvalue-abs": second_eigenvalue_abs,
    "meta-degree": meta_degree_stat,
    "triangle-count": triangle_count,
    "max-eigenvalue": max_eigenvalue,
}

_ALIASES = {
    "eig2": "second-largest-eigenvalue-abs",
    "lambda2": "second-largest-eigenvalue-abs",
    "meta": "meta-degree",
    "triangles": "triangle-count",
    "eig1": "max-eigenvalue",
    "lambda1": "max-eigenvalue",
}


def statistic_function(name):
    """Resolve a statistic name (or short alias) to ``(canonical_name, fn)``."""
    key = _ALIASES.get(name, name)
    if key not in STATISTICS:
        known = sorted(STATISTICS) + sorted(_ALIASES)
        raise ValidationError(f"unknown statistic {name!r}; choose from {', '.join(known)}")
    return key, STATISTICS[key]


def monte_carlo_pvalue(observed, null) -> float:
    """Two-sided add-one p-value: twice the smaller tail, capped at 1."""
    null = np.asarray(null, dtype=float)
    r = null.shape[0]
    scale = max(1.0, abs(float(observed)))
    tol = 1e-9 * scale  # eigenvalues of identical graphs may differ in the last bits
    hi = 1 + int(np.count_nonzero(null >= observed - tol))
    lo = 1 + int(np.count_nonzero(null <= observed + tol))
    return min(1.0, 2.0 * min(hi, lo) / (r + 1))


def _chain_null(g, replicates, seed, burn_in, thin, method):
    if fixed_degree.meta_degree(g) == 0:
        raise FrozenChainError(
            "meta-degree is 0: no other graph has these degrees reachable by swaps; "
            "the conditional test is impossible"
        )
    return list(fixed_degree.fixed_degree_null(g, replicates, seed, burn_in, thin, method))


def mc_degree_tests(g: Graph, statistics, replicates: int = DEFAULT_REPLICATES, seed=None,
                    burn_in=None, thin=None, method="metropolis", null_sampler=None):
    """Run the conditional test for several statistics on one shared null.

    ``null_sampler(replicates, seed)`` may replace the swap chain with any
    source of fixed-degree graphs (adjacency arrays); the tests use it with
    exact draws from enumerated degree classes.
    Returns ``{statistic_name: TestReport}``.
    """
    replicates = int(replicates)
    if replicates < MIN_REPLICATES:
        raise ValidationError(f"need at least {MIN_REPLICATES} replicates")
    fns = [statistic_function(s) for s in statistics]
    if not fns:
        raise ValidationError("no statistic given")
    seed = _resolve_seed(seed)
    if null_sampler is None:
        null = _chain_null(g, replicates, seed, burn_in, thin, method)
    else:
        null = list(null_sampler(replicates, seed))
        if len(null) != replicates:
            raise ValidationError("null sampler returned the wrong number of graphs")

    def evaluate(adj):
        return [fn(adj) for _, fn in fns]

    values = np.array(map_ordered(evaluate, null), dtype=float).reshape(replicates, len(fns))
    observed = evaluate(g.adjacency)
    out = {}
    for col, (name, _) in enumerate(fns):
        sample = values[:, col]
        out[name] = TestReport(
            f"mc-{name}", observed[col], monte_carlo_pvalue(observed[col], sample),
            replicates, seed, sample,
        )
    return out


def mc_degree_test(g: Graph, statistic="second-largest-eigenvalue-abs",
                   replicates: int = DEFAULT_REPLICATES, seed=None, burn_in=None, thin=None,
                   method="metropolis", null_sampler=None) -> TestReport:
    """Monte Carlo test of ``g`` against uniform graphs with its degree sequence.

    The null is one swap chain started at ``g``: burn-in ``10 n^2`` steps,
    then a state every ``n^2`` steps (both overridable).
    """
    reports = mc_degree_tests(g, [statistic], replicates, seed, burn_in, thin, method,
                              null_sampler)
    return next(iter(reports.values()))
