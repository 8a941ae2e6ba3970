"""Edge-probability models: additive, beta, k-beta and small-odds-rank.

The three odds-based models give each pair an odds ``r`` and the edge
probability ``r / (1 + r)``::

    beta     r(i, j) = beta_i * beta_j
    kbeta    r(i, j) = b(i, c(j)) * b(j, c(i))
    rank     r(i, j) = sum_s b(i, s) * b(j, s)

The additive model is ``p + p_i + p_j`` directly. Parameters are validated
on construction so sampling and entropy code only ever see probabilities in
the open unit interval.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DegenerateLabelingError, ValidationError
from .graph import Graph

__all__ = [
    "AdditiveParams",
    "BetaParams",
    "KBetaParams",
    "RankParams",
    "Labeling",
    "ModelParams",
    "edge_probability",
    "probability_matrix",
    "sample_graph",
    "sample_from_matrix",
    "dae",
    "params_to_dict",
    "params_from_dict",
    "load_params",
    "dump_params",
]


def _as_vector(x, name):
    arr = np.array(x, dtype=float, copy=True).ravel()
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


def _as_positive_matrix(b, name="b"):
    arr = np.array(b, dtype=float, copy=True)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"{name} must be a non-empty n x k matrix")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValidationError(f"all entries of {name} must be finite and > 0")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Labeling:
    """Vertex colors ``c(i)`` in ``1..k``.

    ``index`` gives the same colors shifted to ``0..k-1`` for array work.
    """

    c: np.ndarray
    k: int

    def __post_init__(self):
        c = np.array(self.c, dtype=np.int64, copy=True).ravel()
        k = int(self.k)
        if k < 1:
            raise ValidationError("k must be at least 1")
        if c.size and (c.min() < 1 or c.max() > k):
            raise ValidationError(f"labels must lie in 1..{k}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_index(cls, index, k=None):
        index = np.asarray(index, dtype=np.int64)
        if k is None:
            k = int(index.max()) + 1 if index.size else 1
        return cls(index + 1, k)

    @property
    def n(self):
        return self.c.size

    @property
    def index(self):
        return self.c - 1

    def sizes(self):
        return np.bincount(self.index, minlength=self.k)

    def check_nondegenerate(self):
        sizes = self.sizes()
        empty = np.flatnonzero(sizes == 0)
        if empty.size:
            raise DegenerateLabelingError(
                f"color(s) {', '.join(str(s + 1) for s in empty)} used by no vertex"
            )

    def canonical(self):
        """Colors renamed in order of first appearance (kills color permutations)."""
        mapping = {}
        out = np.empty_like(self.c)
        for i, col in enumerate(self.c):
            out[i] = mapping.setdefault(int(col), len(mapping) + 1)
        return Labeling(out, self.k)

    def __eq__(self, other):
        if not isinstance(other, Labeling):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.c, other.c)

    def __repr__(self):
        return f"Labeling(n={self.n}, k={self.k})"


@dataclass(frozen=True, eq=False)
class AdditiveParams:
    """``P(edge ij) = p + p_i + p_j`` with ``sum(p_i) = 0``.

    ``strict=False`` skips the range check; estimation uses it to report
    least-squares fits that fall outside (0, 1).
    """

    p: float
    effects: np.ndarray
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        effects = _as_vector(self.effects, "effects")
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "p", float(self.p))
        if abs(effects.sum()) > 1e-12 * max(1.0, effects.size):
            raise ValidationError(f"effects must sum to zero (sum = {effects.sum():.3g})")
        if self.strict:
            bad = _additive_out_of_range(self.p, effects)
            if bad is not None:
                raise ValidationError(
                    f"probability for pair {bad[:2]} is {bad[2]:.6g}, outside (0, 1)"
                )

    @property
    def n(self):
        return self.effects.size

    def out_of_range_pairs(self):
        pm = self.p + self.effects[:, None] + self.effects[None, :]
        iu = np.triu_indices(self.n, 1)
        vals = pm[iu]
        bad = (vals <= 0) | (vals >= 1)
        return [(int(i), int(j)) for i, j in zip(iu[0][bad], iu[1][bad])]


def _additive_out_of_range(p, effects):
    n = effects.size
    if n < 2:
        return None
    pm = p + effects[:, None] + effects[None, :]
    np.fill_diagonal(pm, 0.5)
    bad = np.argwhere((pm <= 0) | (pm >= 1))
    if bad.size == 0:
        return None
    i, j = bad[0]
    return int(min(i, j)), int(max(i, j)), float(pm[i, j])


@dataclass(frozen=True, eq=False)
class BetaParams:
    """Symmetric beta (Rasch) model, odds ``beta_i * beta_j``."""

    beta: np.ndarray

    def __post_init__(self):
        beta = _as_vector(self.beta, "beta")
        if beta.size < 1 or np.any(beta <= 0):
            raise ValidationError("beta must be a non-empty vector of positive numbers")
        object.__setattr__(self, "beta", beta)

    @property
    def n(self):
        return self.beta.size


@dataclass(frozen=True, eq=False)
class KBetaParams:
    """k-beta model: ``n x k`` positive matrix ``b`` and a vertex labeling."""

    b: np.ndarray
    labels: Labeling

    def __post_init__(self):
        b = _as_positive_matrix(self.b)
        labels = self.labels
        if not isinstance(labels, Labeling):
            labels = Labeling(labels, b.shape[1])
        if labels.n != b.shape[0]:
            raise ValidationError(f"{labels.n} labels for {b.shape[0]} rows of b")
        if labels.k != b.shape[1]:
            raise ValidationError(f"labeling has k={labels.k} but b has {b.shape[1]} columns")
        labels.check_nondegenerate()
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.b.shape[0]

    @property
    def k(self):
        return self.b.shape[1]


@dataclass(frozen=True, eq=False)
class RankParams:
    """Small-odds-rank model, odds ``sum_s b(i, s) b(j, s)`` for ``i != j``."""

    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "b", _as_positive_matrix(self.b))

    @property
    def n(self):
        return self.b.shape[0]

    @property
    def k(self):
        return self.b.shape[1]


ModelParams = Union[AdditiveParams, BetaParams, KBetaParams, RankParams]


def _odds_matrix(params):
    if isinstance(params, BetaParams):
        return np.outer(params.beta, params.beta)
    if isinstance(params, KBetaParams):
        # bc[i, j] = b(i, c(j))
        bc = params.b[:, params.labels.index]
        return bc * bc.T
    if isinstance(params, RankParams):
        return params.b @ params.b.T
    raise TypeError(f"not an odds-based model: {type(params).__name__}")


def _odds_to_prob(r):
    # r / (1 + r) for small odds, 1 / (1 + 1/r) for large: no overflow, no 1/0
    r = np.asarray(r, dtype=float)
    small = r < 1.0
    safe = np.where(small, 1.0, r)
    low = np.where(small, r, 0.0)
    return np.where(small, low / (1.0 + low), 1.0 / (1.0 + 1.0 / safe))


def edge_probability(params: ModelParams, i: int, j: int) -> float:
    if i == j:
        raise ValidationError("edge probability is undefined for i == j")
    n = params.n
    if not (0 <= i < n and 0 <= j < n):
        raise ValidationError(f"vertex out of range for n={n}")
    if isinstance(params, AdditiveParams):
        return float(params.p + params.effects[i] + params.effects[j])
    if isinstance(params, BetaParams):
        r = params.beta[i] * params.beta[j]
    elif isinstance(params, KBetaParams):
        c = params.labels.index
        r = params.b[i, c[j]] * params.b[j, c[i]]
    elif isinstance(params, RankParams):
        r = float(params.b[i] @ params.b[j])
    else:
        raise TypeError(f"unknown parameter type {type(params).__name__}")
    return float(_odds_to_prob(r))


def probability_matrix(params: ModelParams) -> np.ndarray:
    """Symmetric ``n x n`` edge-probability matrix with zero diagonal."""
    if isinstance(params, AdditiveParams):
        pm = params.p + params.effects[:, None] + params.effects[None, :]
    else:
        pm = _odds_to_prob(_odds_matrix(params))
    # exact symmetry regardless of float evaluation order
    pm = np.triu(pm, 1)
    pm = pm + pm.T
    return pm


def sample_from_matrix(pm, seed=None) -> Graph:
    """Independent Bernoulli draw for each pair ``i < j`` of ``pm``."""
    pm = np.asarray(pm, dtype=float)
    n = pm.shape[0]
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    hits = rng.random(iu[0].size) < pm[iu]
    adj = np.zeros((n, n), dtype=bool)
    adj[iu[0][hits], iu[1][hits]] = True
    return Graph(adj | adj.T)


def sample_graph(params: ModelParams, seed=None) -> Graph:
    """Sample a graph from ``params``; ``seed`` feeds ``numpy.random.default_rng``."""
    return sample_from_matrix(probability_matrix(params), seed)


def dae(pm) -> float:
    """Delogarithmed average entropy of the off-diagonal pairs, in [1, 2].

    ``exp`` of the mean Bernoulli entropy (natural log) over pairs ``i < j``.
    """
    pm = np.asarray(pm, dtype=float)
    if pm.ndim != 2 or pm.shape[0] != pm.shape[1]:
        raise ValidationError("probability matrix must be square")
    n = pm.shape[0]
    if n < 2:
        raise ValidationError("DAE needs at least two vertices")
    p = pm[np.triu_indices(n, 1)]
    if np.any(~(p > 0) | ~(p < 1)):
        raise ValidationError("DAE requires every off-diagonal probability in (0, 1)")
    h = -(p * np.log(p) + (1 - p) * np.log1p(-p))
    return float(np.exp(h.mean()))


# -- JSON schema -----------------------------------------------------------

def params_to_dict(params: ModelParams) -> dict:
    if isinstance(params, AdditiveParams):
        return {"model": "additive", "p": params.p, "effects": params.effects.tolist()}
    if isinstance(params, BetaParams):
        return {"model": "beta", "beta": params.beta.tolist()}
    if isinstance(params, KBetaParams):
        return {"model": "kbeta", "b": params.b.tolist(), "labels": params.labels.c.tolist()}
    if isinstance(params, RankParams):
        return {"model": "rank", "b": params.b.tolist()}
    raise TypeError(f"unknown parameter type {type(params).__name__}")


def params_from_dict(doc: dict) -> ModelParams:
    try:
        model = doc["model"]
        if model == "additive":
            return AdditiveParams(doc["p"], doc["effects"])
        if model == "beta":
            return BetaParams(doc["beta"])
        if model == "kbeta":
            b = np.asarray(doc["b"], dtype=float)
            return KBetaParams(b, Labeling(doc["labels"], b.shape[1] if b.ndim == 2 else 1))
        if model == "rank":
            return RankParams(doc["b"])
    except KeyError as exc:
        raise ValidationError(f"parameter document missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad parameter document: {exc}") from None
    raise ValidationError(f"unknown model {model!r}")


def load_params(path) -> ModelParams:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return params_from_dict(doc)


def dump_params(params: ModelParams) -> str:
    return json.dumps(params_to_dict(params))
