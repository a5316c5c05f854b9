"""Seeded instance generators for tests and benchmarks."""

import math

import numpy as np

from ._rng import stream
from .instance import AimInstance, min_bit_precision


def random_digraph(m, edge_count, rng, prob_high=0.5):
    """Simple directed graph: edge_count distinct ordered pairs with probabilities in (0, prob_high]."""
    if edge_count < 0 or edge_count > m * (m - 1):
        raise ValueError(f"cannot place {edge_count} distinct edges on {m} nodes")
    if edge_count == 0:
        return ()
    codes = rng.choice(m * (m - 1), size=edge_count, replace=False)
    probs = prob_high * (1.0 - rng.random(edge_count))
    edges = []
    for code, p in zip(sorted(int(c) for c in codes), probs):
        u, rest = divmod(code, m - 1)
        w = rest + (rest >= u)
        edges.append((u, w, float(p)))
    return tuple(edges)


def gen_rank_r(
    n,
    m,
    r,
    edge_prob=1.0,
    social_edge_count=0,
    seed=0,
    budget_providers=None,
    budget_consumers=None,
    factor_low=0.0,
    bit_precision=None,
):
    """Instance whose matrix is a rank-r product of uniform factors.

    Factors A (n x r) and B (r x m) have entries uniform in
    [factor_low, 1) / sqrt(r), so every product entry stays within [0,1] and
    clamping never fires. edge_prob < 1 zeroes entries of A, which sparsifies
    the matrix while keeping its rank at most r. Social edges form a random
    simple digraph with probabilities uniform in (0, 0.5].
    """
    if not 1 <= r <= min(n, m):
        raise ValueError(f"rank {r} must lie in [1, min({n},{m})]")
    if not 0.0 <= factor_low < 1.0:
        raise ValueError(f"factor_low must lie in [0,1), got {factor_low}")
    rng = stream(seed, "rank_r", n, m, r)
    scale = 1.0 / math.sqrt(r)
    A = (factor_low + (1.0 - factor_low) * rng.random((n, r))) * scale
    B = (factor_low + (1.0 - factor_low) * rng.random((r, m))) * scale
    if edge_prob < 1.0:
        A[rng.random((n, r)) >= edge_prob] = 0.0
    M = np.clip(A @ B, 0.0, 1.0)
    edges = random_digraph(m, social_edge_count, rng)
    lam = bit_precision if bit_precision is not None else min_bit_precision(M)
    if 2.0 ** -lam > M[M > 0].min(initial=1.0):
        raise ValueError(
            f"bit_precision {lam} too coarse: floor 2^-{lam} exceeds the smallest nonzero entry"
        )
    return AimInstance(
        n_providers=n,
        n_consumers=m,
        bipartite=M,
        social_edges=edges,
        budget_providers=budget_providers or max(1, n // 3),
        budget_consumers=budget_consumers or max(1, m // 3),
        bit_precision=lam,
    )


def gen_planted_biclique(n_vertices, k, seed=0):
    """Half-density base graph with a planted k-clique, lifted to a two-sided instance.

    Providers and consumers are both copies of the vertex set; the matrix has
    1/n^2 on base-graph edges and 0 elsewhere, the social graph is empty, and
    both budgets are k/2. Returns (instance, planted vertex tuple).
    """
    n = int(n_vertices)
    if k % 2 or not 2 <= k <= n:
        raise ValueError(f"k must be even with 2 <= k <= {n}, got {k}")
    rng = stream(seed, "planted", n, k)
    upper = np.triu(rng.random((n, n)) < 0.5, 1)
    adj = upper | upper.T
    planted = np.sort(rng.choice(n, size=k, replace=False))
    block = np.ix_(planted, planted)
    adj[block] = True
    np.fill_diagonal(adj, False)
    M = np.where(adj, 1.0 / n**2, 0.0)
    return (
        AimInstance(
            n_providers=n,
            n_consumers=n,
            bipartite=M,
            social_edges=(),
            budget_providers=k // 2,
            budget_consumers=k // 2,
            bit_precision=min_bit_precision(M),
        ),
        tuple(int(v) for v in planted),
    )


def gen_classic_im(social_edges, m, b2, seed=0):
    """Classic cascade seeding as a two-stage instance: one provider, all-ones matrix.

    With the provider budget forced to the whole (single-node) provider side,
    every chosen consumer activates outright, so optimizing the consumer set
    is exactly influence maximization on the social graph with budget b2.
    """
    del seed  # the construction is fully determined by its inputs
    return AimInstance(
        n_providers=1,
        n_consumers=m,
        bipartite=np.ones((1, m)),
        social_edges=tuple((int(u), int(w), float(p)) for u, w, p in social_edges),
        budget_providers=1,
        budget_consumers=b2,
        bit_precision=1,
    )


def gen_three_layer(k, groups, bottom_per_group, middle_per_group=1, seed=0):
    """Layered stress shape: provider groups hit middle consumers at rate 1/k.

    Each group has k providers wired to its middle consumers with probability
    exactly 1/k, and every middle consumer covers the group's bottom block
    through probability-1 social edges. Bottom consumers have no provider
    edges at all. Budgets are one group of providers (k) and one middle pick
    per group (groups).
    """
    del seed  # the construction is fully determined by its inputs
    if k < 1 or groups < 1 or bottom_per_group < 0 or middle_per_group < 1:
        raise ValueError("layer sizes must be positive (bottom may be zero)")
    n = k * groups
    per_group = middle_per_group + bottom_per_group
    m = groups * per_group
    M = np.zeros((n, m))
    edges = []
    for g in range(groups):
        middles = [g * per_group + j for j in range(middle_per_group)]
        bottoms = [g * per_group + middle_per_group + j for j in range(bottom_per_group)]
        for i in range(k):
            M[g * k + i, middles] = 1.0 / k
        for mid in middles:
            for bot in bottoms:
                edges.append((mid, bot, 1.0))
    lam = 1
    while 2.0 ** -lam > 1.0 / k:
        lam += 1
    return AimInstance(
        n_providers=n,
        n_consumers=m,
        bipartite=M,
        social_edges=tuple(edges),
        budget_providers=k,
        budget_consumers=groups,
        bit_precision=lam,
    )


def gen_from_params(family, params, seed):
    """Build an instance from a flat parameter dict; returns (instance, extras).

    extras holds generator metadata worth keeping with the emitted document,
    currently only the planted vertex set of the planted family.
    """
    p = dict(params)
    if family == "rank_r":
        inst = gen_rank_r(
            n=int(p.pop("n")),
            m=int(p.pop("m")),
            r=int(p.pop("r")),
            edge_prob=float(p.pop("edge_prob", 1.0)),
            social_edge_count=int(p.pop("social_edges", 0)),
            seed=seed,
            budget_providers=int(p["b1"]) if "b1" in p else None,
            budget_consumers=int(p["b2"]) if "b2" in p else None,
            factor_low=float(p.pop("factor_low", 0.0)),
            bit_precision=int(p["bit_precision"]) if "bit_precision" in p else None,
        )
        return inst, {}
    if family == "planted":
        inst, planted = gen_planted_biclique(int(p["n"]), int(p["k"]), seed=seed)
        return inst, {"planted": list(planted)}
    if family == "classic_im":
        m = int(p["m"])
        edges = random_digraph(m, int(p.get("edge_count", 0)), stream(seed, "classic_im", m))
        return gen_classic_im(edges, m, int(p["b2"]), seed=seed), {}
    if family == "three_layer":
        inst = gen_three_layer(
            k=int(p["k"]),
            groups=int(p["groups"]),
            bottom_per_group=int(p.get("bottom", 1)),
            middle_per_group=int(p.get("middle", 1)),
            seed=seed,
        )
        return inst, {}
    raise ValueError(f"unknown family: {family}")
