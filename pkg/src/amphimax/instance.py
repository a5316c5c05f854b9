"""Problem data model: validation, serialization, and row-rank extraction."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

DEFAULT_BIT_PRECISION = 20
RANK_TOL = 1e-9


class InstanceFormatError(ValueError):
    """Raised when an instance document cannot be parsed."""


class InstanceValidationError(ValueError):
    """Raised when a parsed instance violates its invariants."""

    def __init__(self, violations):
        super().__init__("invalid instance: " + "; ".join(violations))
        self.violations = list(violations)


@dataclass(frozen=True, eq=False)
class AimInstance:
    """One seeding problem: influence matrix, social graph, and budgets.

    Attributes
    ----------
    n_providers : int
        Number of provider nodes (rows of the influence matrix).
    n_consumers : int
        Number of consumer nodes (columns, and vertices of the social graph).
    bipartite : ndarray of shape (n_providers, n_consumers)
        Entry (i, j) is the probability that seed provider i directly
        activates consumer j. Stored dense and read-only.
    social_edges : tuple of (source, target, probability)
        Directed consumer-to-consumer edges with probabilities in (0, 1].
    budget_providers : int
        Exact number of providers to seed.
    budget_consumers : int
        Exact number of consumers to seed.
    bit_precision : int
        Lambda such that every nonzero matrix entry is at least 2**-lambda.
    """

    n_providers: int
    n_consumers: int
    bipartite: np.ndarray
    social_edges: tuple
    budget_providers: int
    budget_consumers: int
    bit_precision: int = DEFAULT_BIT_PRECISION

    def __post_init__(self):
        mat = np.array(self.bipartite, dtype=float)
        mat.setflags(write=False)
        object.__setattr__(self, "bipartite", mat)
        edges = tuple((int(u), int(v), float(p)) for u, v, p in self.social_edges)
        object.__setattr__(self, "social_edges", edges)

    # identity hashing keeps instances usable as cache keys while the
    # field-wise equality below serves round-trip tests
    __hash__ = object.__hash__

    def __eq__(self, other):
        if not isinstance(other, AimInstance):
            return NotImplemented
        return (
            self.n_providers == other.n_providers
            and self.n_consumers == other.n_consumers
            and self.bipartite.shape == other.bipartite.shape
            and np.array_equal(self.bipartite, other.bipartite)
            and self.social_edges == other.social_edges
            and self.budget_providers == other.budget_providers
            and self.budget_consumers == other.budget_consumers
            and self.bit_precision == other.bit_precision
        )


@dataclass(frozen=True)
class RankBasis:
    """A row basis of the influence matrix.

    Attributes
    ----------
    rank : int
        Number of independent rows found at the working tolerance.
    row_indices : tuple of int
        Indices of the rows kept, in scan order.
    basis_rows : ndarray of shape (rank, n_consumers)
        The kept rows themselves.
    """

    rank: int
    row_indices: tuple
    basis_rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.basis_rows, dtype=float)
        rows.setflags(write=False)
        object.__setattr__(self, "basis_rows", rows)
        object.__setattr__(self, "row_indices", tuple(int(i) for i in self.row_indices))


def validate(instance):
    """Check every structural invariant of an instance.

    Parameters
    ----------
    instance : AimInstance

    Returns
    -------
    list of str
        One message per violation, each locating the offending entry, edge,
        or budget. An empty list means the instance is well-formed.
    """
    v = []
    n, m = instance.n_providers, instance.n_consumers
    mat = instance.bipartite
    if n < 1:
        v.append("n_providers must be at least 1")
    if m < 1:
        v.append("n_consumers must be at least 1")
    if instance.bit_precision < 1:
        v.append("bit_precision must be at least 1")
    if mat.shape != (n, m):
        v.append(f"matrix shape {mat.shape} does not match ({n}, {m})")
        return v
    if not np.all(np.isfinite(mat)):
        bad = np.argwhere(~np.isfinite(mat))
        for i, j in bad[:10]:
            v.append(f"entry not finite at ({i},{j})")
        return v
    for i, j in np.argwhere((mat < 0.0) | (mat > 1.0)):
        v.append(f"entry out of [0,1] at ({i},{j})")
    floor = 2.0 ** -instance.bit_precision
    for i, j in np.argwhere((mat > 0.0) & (mat < floor)):
        v.append(f"nonzero entry below 2^-{instance.bit_precision} at ({i},{j})")
    seen = set()
    for k, (u, w, p) in enumerate(instance.social_edges):
        if not (0 <= u < m) or not (0 <= w < m):
            v.append(f"edge {k} endpoint out of range: ({u},{w})")
            continue
        if u == w:
            v.append(f"edge {k} is a self-loop at {u}")
        if not (0.0 < p <= 1.0):
            v.append(f"edge {k} probability out of (0,1]: {p}")
        if (u, w) in seen:
            v.append(f"duplicate edge ({u},{w}) at index {k}")
        seen.add((u, w))
    if instance.budget_providers < 1:
        v.append(f"provider budget must be at least 1, got {instance.budget_providers}")
    elif instance.budget_providers > n:
        v.append(f"provider budget exceeds ground set ({instance.budget_providers} > {n})")
    if instance.budget_consumers < 1:
        v.append(f"consumer budget must be at least 1, got {instance.budget_consumers}")
    elif instance.budget_consumers > m:
        v.append(f"consumer budget exceeds ground set ({instance.budget_consumers} > {m})")
    return v


def numerical_rank(M, tol=RANK_TOL):
    """Greedy row basis of M at an absolute reconstruction tolerance.

    Rows are scanned in order; a row is kept when its least-squares residual
    against the rows already kept exceeds `tol` in max-abs norm. The scan is
    deterministic, so identical matrices always give identical bases.

    Parameters
    ----------
    M : array_like
        Matrix to factor.
    tol : float
        Max-abs reconstruction error allowed for a row to count as dependent.

    Returns
    -------
    RankBasis
    """
    M = np.asarray(M, dtype=float)
    kept = []
    ortho = []
    for i in range(M.shape[0]):
        resid = M[i].astype(float)
        # two projection passes keep the residual orthogonal despite rounding
        for _ in range(2):
            for q in ortho:
                resid = resid - (resid @ q) * q
        if resid.size and np.max(np.abs(resid)) > tol:
            kept.append(i)
            ortho.append(resid / np.linalg.norm(resid))
    rows = M[kept] if kept else np.zeros((0, M.shape[1]))
    return RankBasis(rank=len(kept), row_indices=tuple(kept), basis_rows=rows)


def min_bit_precision(M):
    """Smallest lambda such that every nonzero entry of M is >= 2**-lambda."""
    M = np.asarray(M, dtype=float)
    nz = M[M > 0]
    if nz.size == 0:
        return 1
    lo = float(nz.min())
    lam = 1
    while 2.0 ** -lam > lo:
        lam += 1
        if lam > 1074:
            raise ValueError("matrix entries too small for any usable bit precision")
    return lam


def _matrix_from_doc(bip, n, m):
    if not isinstance(bip, dict):
        raise InstanceFormatError("bipartite must be an object with 'dense' or 'left'/'right'")
    if "dense" in bip:
        mat = np.array(bip["dense"], dtype=float)
        if mat.ndim != 2 or mat.shape != (n, m):
            raise InstanceFormatError(f"bipartite.dense must be a {n}x{m} matrix, got shape {mat.shape}")
        return mat
    if "left" in bip and "right" in bip:
        left = np.array(bip["left"], dtype=float)
        right = np.array(bip["right"], dtype=float)
        if left.ndim != 2 or right.ndim != 2 or left.shape[0] != n or right.shape[1] != m:
            raise InstanceFormatError(
                f"factored bipartite must multiply to {n}x{m}, got {left.shape} x {right.shape}"
            )
        if left.shape[1] != right.shape[0]:
            raise InstanceFormatError(
                f"factored bipartite inner dimensions differ: {left.shape[1]} vs {right.shape[0]}"
            )
        # products of factored inputs may leave [0,1]; clamp at load
        return np.clip(left @ right, 0.0, 1.0)
    raise InstanceFormatError("bipartite must provide either 'dense' or both 'left' and 'right'")


def parse_instance(text):
    """Parse a JSON instance document and validate the result.

    Parameters
    ----------
    text : str or bytes
        JSON document with fields n, m, bipartite (dense or left/right
        factored), social_edges, budgets, and optional bit_precision.

    Returns
    -------
    AimInstance

    Raises
    ------
    InstanceFormatError
        When the document is not JSON or a field is missing or malformed.
    InstanceValidationError
        When the parsed instance breaks an invariant.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level must be a JSON object")
    for name in ("n", "m", "bipartite", "social_edges", "budgets"):
        if name not in doc:
            raise InstanceFormatError(f"missing field: {name}")
    try:
        n = int(doc["n"])
        m = int(doc["m"])
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"n and m must be integers: {exc}") from exc
    mat = _matrix_from_doc(doc["bipartite"], n, m)
    raw_edges = doc["social_edges"]
    if not isinstance(raw_edges, list):
        raise InstanceFormatError("social_edges must be an array")
    edges = []
    for k, e in enumerate(raw_edges):
        if not isinstance(e, (list, tuple)) or len(e) != 3:
            raise InstanceFormatError(f"social_edges[{k}] must be [source, target, probability]")
        try:
            edges.append((int(e[0]), int(e[1]), float(e[2])))
        except (TypeError, ValueError) as exc:
            raise InstanceFormatError(f"social_edges[{k}] has a non-numeric entry: {exc}") from exc
    budgets = doc["budgets"]
    if not isinstance(budgets, dict):
        raise InstanceFormatError("budgets must be an object")
    for name in ("providers", "consumers"):
        if name not in budgets:
            raise InstanceFormatError(f"missing field: budgets.{name}")
    try:
        b1 = int(budgets["providers"])
        b2 = int(budgets["consumers"])
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"budgets must be integers: {exc}") from exc
    lam = doc.get("bit_precision", DEFAULT_BIT_PRECISION)
    try:
        lam = int(lam)
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"bit_precision must be an integer: {exc}") from exc
    inst = AimInstance(
        n_providers=n,
        n_consumers=m,
        bipartite=mat,
        social_edges=tuple(edges),
        budget_providers=b1,
        budget_consumers=b2,
        bit_precision=lam,
    )
    violations = validate(inst)
    if violations:
        raise InstanceValidationError(violations)
    return inst


def serialize_instance(instance):
    """Serialize an instance to its JSON document form.

    The result is round-trip stable: parsing it back yields an instance equal
    field-for-field, including exact float values.

    Parameters
    ----------
    instance : AimInstance

    Returns
    -------
    str
    """
    doc = {
        "n": instance.n_providers,
        "m": instance.n_consumers,
        "bipartite": {"dense": [[float(x) for x in row] for row in instance.bipartite]},
        "social_edges": [[u, w, p] for (u, w, p) in instance.social_edges],
        "budgets": {
            "providers": instance.budget_providers,
            "consumers": instance.budget_consumers,
        },
        "bit_precision": instance.bit_precision,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
