"""Cascade sampling, spread estimation, and exact oracles for small instances."""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._rng import stream
from .relaxation import indicator, initial_activation, net_relaxation

EXACT_EDGE_LIMIT = 22
DEFAULT_MC_EPS = 0.05
DEFAULT_MC_DELTA = 0.01


def default_sample_count(mc_eps=DEFAULT_MC_EPS, delta=DEFAULT_MC_DELTA):
    """Sample count for additive error mc_eps (of the consumer count) at confidence 1-delta.

    Hoeffding on spread/m in [0,1]: ceil(ln(2/delta) / (2 mc_eps^2)). The
    defaults give 1060.
    """
    return math.ceil(math.log(2.0 / delta) / (2.0 * mc_eps * mc_eps))


@dataclass(frozen=True)
class SpreadEstimate:
    """Monte Carlo estimate of an expected spread.

    stream_path, when set, records the (master_seed, *path) address of the
    random stream that produced the estimate.
    """

    mean: float
    std_error: float
    samples: int
    stream_path: tuple = None


def adjacency(instance):
    """Out-edge lists [(target, probability), ...] indexed by source consumer."""
    out = [[] for _ in range(instance.n_consumers)]
    for u, w, p in instance.social_edges:
        out[u].append((w, p))
    return out


@lru_cache(maxsize=256)
def _edge_arrays(instance):
    edges = instance.social_edges
    src = np.array([e[0] for e in edges], dtype=np.intp)
    dst = np.array([e[1] for e in edges], dtype=np.intp)
    prob = np.array([e[2] for e in edges], dtype=float)
    inc = np.zeros((len(edges), instance.n_consumers), dtype=np.float32)
    if len(edges):
        inc[np.arange(len(edges)), dst] = 1.0
    return src, dst, prob, inc


def sample_initial_set(x, y, M, rng):
    """One draw of the directly activated consumer set."""
    probs = initial_activation(x, y, M)
    return np.flatnonzero(rng.random(probs.size) < probs)


def simulate_ic(adj, initial, rng):
    """One cascade run over lazily sampled out-edges.

    Forward exploration from the initial set; each out-edge of a node is
    flipped exactly once, when its source first activates.
    """
    active = set(int(v) for v in initial)
    frontier = list(active)
    while frontier:
        nxt = []
        for v in frontier:
            for w, p in adj[v]:
                if w not in active and rng.random() < p:
                    active.add(w)
                    nxt.append(w)
        frontier = nxt
    return active


def _batch_spread(instance, init_probs, samples, rng):
    """Mean and standard error of cascade size over `samples` independent runs.

    Seeds each consumer independently with its init probability, then flips
    every social edge once per run and propagates over live edges; that
    matches the flip-on-first-activation process in distribution, since an
    edge's coin only matters the first time its source activates.
    """
    m = instance.n_consumers
    active = rng.random((samples, m)) < init_probs
    src, dst, prob, inc = _edge_arrays(instance)
    if src.size:
        live = rng.random((samples, src.size)) < prob
        while True:
            push = active[:, src] & live
            counts = push.astype(np.float32) @ inc
            new = (counts > 0.0) & ~active
            if not new.any():
                break
            active |= new
    totals = active.sum(axis=1).astype(float)
    mean = float(totals.mean())
    std_error = float(totals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return mean, std_error


def estimate_sigma(instance, X, Y, samples=None, rng=None, stream_path=None):
    """Monte Carlo estimate of the expected spread for provider set X, consumer set Y."""
    samples = samples or default_sample_count()
    rng = rng if rng is not None else stream(0, "sigma")
    f = initial_activation(
        indicator(X, instance.n_providers), indicator(Y, instance.n_consumers), instance.bipartite
    )
    mean, se = _batch_spread(instance, f, samples, rng)
    return SpreadEstimate(mean=mean, std_error=se, samples=samples, stream_path=stream_path)


def estimate_sigma_hat(instance, s, Y, samples=None, rng=None, stream_path=None):
    """Monte Carlo estimate of the surrogate spread at net point s.

    Each consumer in Y starts active independently with probability
    1 - exp(-s_j), then the cascade runs as usual.
    """
    samples = samples or default_sample_count()
    rng = rng if rng is not None else stream(0, "sigma_hat")
    init = net_relaxation(s, indicator(Y, instance.n_consumers))
    mean, se = _batch_spread(instance, init, samples, rng)
    return SpreadEstimate(mean=mean, std_error=se, samples=samples, stream_path=stream_path)


def estimate_ic_spread(instance, Z, samples=None, rng=None, stream_path=None):
    """Monte Carlo estimate of the plain cascade spread of consumer seed set Z."""
    samples = samples or default_sample_count()
    rng = rng if rng is not None else stream(0, "ic")
    init = indicator(Z, instance.n_consumers)
    mean, se = _batch_spread(instance, init, samples, rng)
    return SpreadEstimate(mean=mean, std_error=se, samples=samples, stream_path=stream_path)


def _split_edges(instance):
    det = [[] for _ in range(instance.n_consumers)]
    stoch = []
    for u, w, p in instance.social_edges:
        if p >= 1.0:
            det[u].append(w)
        else:
            stoch.append((u, w, p))
    return det, stoch


@lru_cache(maxsize=256)
def _exact_parts(instance):
    det, stoch = _split_edges(instance)
    return tuple(tuple(t) for t in det), tuple(stoch)


def _reach(det, extra, seeds, m):
    seen = set(seeds)
    frontier = list(seen)
    while frontier:
        nxt = []
        for v in frontier:
            for w in det[v]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
            for w in extra.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def exact_ic_spread(instance, Z):
    """Exact expected cascade size from consumer seed set Z.

    Enumerates live/blocked assignments of the stochastic social edges;
    probability-1 edges are always live. Results are cached per (instance, Z).
    """
    Z = frozenset(int(v) for v in Z)
    for v in Z:
        if not 0 <= v < instance.n_consumers:
            raise ValueError(f"seed {v} out of range")
    return _exact_ic_cached(instance, Z)


@lru_cache(maxsize=1_000_000)
def _exact_ic_cached(instance, zset):
    det, stoch = _exact_parts(instance)
    ne = len(stoch)
    if ne > EXACT_EDGE_LIMIT:
        raise ValueError(
            f"exact cascade enumeration limited to {EXACT_EDGE_LIMIT} stochastic edges, got {ne}"
        )
    if not zset:
        return 0.0
    total = 0.0
    for mask in range(1 << ne):
        weight = 1.0
        extra = {}
        for e in range(ne):
            u, w, p = stoch[e]
            if mask >> e & 1:
                weight *= p
                extra.setdefault(u, []).append(w)
            else:
                weight *= 1.0 - p
        total += weight * len(_reach(det, extra, zset, instance.n_consumers))
    return total


def _enumerate_products(probs):
    """Yield (subset tuple, probability) over independent inclusion of each index."""
    forced = [j for j, p in probs if p >= 1.0]
    free = [(j, p) for j, p in probs if p < 1.0]
    for picks in itertools.product((0, 1), repeat=len(free)):
        weight = 1.0
        subset = list(forced)
        for bit, (j, p) in zip(picks, free):
            if bit:
                weight *= p
                subset.append(j)
            else:
                weight *= 1.0 - p
        if weight > 0.0:
            yield tuple(sorted(subset)), weight


def exact_sigma(instance, X, Y):
    """Exact expected spread for provider set X and consumer set Y.

    Enumerates the direct-activation outcomes (independent per consumer) and
    weights exact cascade sizes. Guarded: the count of nonzero matrix entries
    from X to Y plus the social edge count must stay within the enumeration
    limit.
    """
    X = sorted(set(int(i) for i in X))
    Y = sorted(set(int(j) for j in Y))
    mat = instance.bipartite
    bip_edges = int((mat[np.ix_(X, Y)] > 0).sum()) if X and Y else 0
    relevant = bip_edges + len(instance.social_edges)
    if relevant > EXACT_EDGE_LIMIT:
        raise ValueError(
            f"exact spread enumeration limited to {EXACT_EDGE_LIMIT} relevant edges, got {relevant}"
        )
    if not X or not Y:
        return 0.0
    f = initial_activation(
        indicator(X, instance.n_providers), indicator(Y, instance.n_consumers), mat
    )
    probs = [(j, float(f[j])) for j in np.flatnonzero(f > 0.0)]
    total = 0.0
    for subset, weight in _enumerate_products(probs):
        total += weight * exact_ic_spread(instance, subset)
    return total


def exact_rho_bar(instance, zbar):
    """Exact expected cascade size when consumer j seeds independently with probability zbar_j."""
    zbar = np.asarray(zbar, dtype=float).ravel()
    m = instance.n_consumers
    if zbar.size != m:
        raise ValueError(f"zbar has length {zbar.size}, expected {m}")
    if (zbar < 0).any() or (zbar > 1).any():
        raise ValueError("zbar entries must lie in [0,1]")
    if m + len(instance.social_edges) > EXACT_EDGE_LIMIT:
        raise ValueError(
            f"exact extension limited to consumer count plus social edges <= {EXACT_EDGE_LIMIT}"
        )
    probs = [(int(j), float(zbar[j])) for j in np.flatnonzero(zbar > 0.0)]
    total = 0.0
    for subset, weight in _enumerate_products(probs):
        total += weight * exact_ic_spread(instance, subset)
    return total


def _evaluator(oracle):
    return oracle.evaluate if hasattr(oracle, "evaluate") else oracle


def generalized_sigma(instance, X, Y, oracle, samples=None, rng=None, stream_path=None):
    """Monte Carlo estimate of E[rho(Z)] over direct-activation draws Z.

    Works for any spread oracle rho over consumer subsets; with the cascade
    oracle this estimates the same quantity as estimate_sigma.
    """
    samples = samples or default_sample_count()
    rng = rng if rng is not None else stream(0, "generalized")
    evaluate = _evaluator(oracle)
    xb = indicator(X, instance.n_providers)
    yb = indicator(Y, instance.n_consumers)
    vals = np.empty(samples)
    for t in range(samples):
        Z = sample_initial_set(xb, yb, instance.bipartite, rng)
        vals[t] = float(evaluate(frozenset(int(v) for v in Z)))
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return SpreadEstimate(mean=mean, std_error=se, samples=samples, stream_path=stream_path)


class _BackgroundOracle:
    """Spread oracle averaged over independent background activation draws."""

    def __init__(self, evaluate, background, samples_inner, rng):
        self._evaluate = evaluate
        self._background = background
        self._samples = samples_inner
        self._rng = rng

    def evaluate(self, Z):
        base = frozenset(int(v) for v in Z)
        m = self._background.size
        total = 0.0
        # fresh draws on every call: estimates are noisy but unbiased
        for _ in range(self._samples):
            extra = np.flatnonzero(self._rng.random(m) < self._background)
            total += float(self._evaluate(base.union(int(v) for v in extra)))
        return total / self._samples


def with_background(oracle, b, samples_inner, rng=None):
    """Wrap a spread oracle so consumers also light up on their own.

    The wrapped oracle estimates rho'(Z) = E over background sets Z0 drawn
    independently per consumer from b of rho(Z united with Z0).
    """
    b = np.asarray(b, dtype=float).ravel()
    if (b < 0).any() or (b > 1).any():
        raise ValueError("background probabilities must lie in [0,1]")
    rng = rng if rng is not None else stream(0, "background")
    return _BackgroundOracle(_evaluator(oracle), b, samples_inner, rng)
