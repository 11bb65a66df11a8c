"""Euclidean (CAT(0)) distances on finite cube complexes, optionally rescaled.

The interval between two vertices embeds isometrically in R^k, k its
dimension: split the separating hyperplanes into chains of nested ones and
give each chain an axis.  Cubes of the interval become axis-parallel boxes,
so the geodesic is a shortest path through a union of boxes.

That path is estimated on grids placed on the pairwise intersections of
maximal boxes (straight segments inside each box), refined by halving the
spacing, and then polished by a convex "touring" pass that lets each break
point slide within its intersection face.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product

import networkx as nx
import numpy as np
from scipy.optimize import minimize
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .cubecomplex import CubeComplex, bits, popcount
from .errors import DomainError, ResourceLimitError

MAX_LEVELS = 8
NODE_CAP = 4000


@dataclass(frozen=True)
class Rescaling:
    """Positive length per hyperplane label; unlisted hyperplanes have length ``default``."""

    lengths: dict = field(default_factory=dict)
    default: float = 1.0

    def __call__(self, label) -> float:
        return float(self.lengths.get(label, self.default))

    def bounds(self, labels) -> tuple[float, float]:
        vals = [self(h) for h in labels]
        return min(vals), max(vals)

    @classmethod
    def uniform(cls) -> "Rescaling":
        return cls({})

    @classmethod
    def by_prefix(cls, labels, factors: dict[str, float]) -> "Rescaling":
        """Scale every hyperplane whose label starts with a given prefix."""
        out = {}
        for h in labels:
            for pre, f in factors.items():
                if str(h).startswith(pre):
                    out[h] = f
        return cls(out)


def validate_rescaling(rho: Rescaling, labels=None) -> dict:
    labels = list(labels) if labels is not None else list(rho.lengths)
    vals = [rho(h) for h in labels] or [rho.default]
    for h, v in zip(labels or ["default"], vals):
        if not math.isfinite(v) or v <= 0:
            raise DomainError(f"hyperplane {h} has non-positive or infinite length {v}")
    if not math.isfinite(rho.default) or rho.default <= 0:
        raise DomainError("default length must be positive and finite")
    return {"valid": True, "m": min(vals), "M": max(vals)}


# ---------------------------------------------------------------- interval embedding

@dataclass
class IntervalEmbedding:
    vertices: list[int]
    chains: list[list[int]]          # hyperplane indices, ordered from x toward y
    coords: dict[int, np.ndarray]
    boxes: list[tuple[np.ndarray, np.ndarray]]

    @property
    def dim(self) -> int:
        return len(self.chains)


def _chain_partition(walls: list[int], before) -> list[list[int]]:
    """Minimum chain cover of a finite poset (Dilworth via bipartite matching)."""
    G = nx.Graph()
    left = [("L", h) for h in walls]
    right = [("R", h) for h in walls]
    G.add_nodes_from(left, bipartite=0)
    G.add_nodes_from(right, bipartite=1)
    for h in walls:
        for k in walls:
            if h != k and before(h, k):
                G.add_edge(("L", h), ("R", k))
    match = nx.bipartite.hopcroft_karp_matching(G, top_nodes=left)
    nxt = {h: match[("L", h)][1] for h in walls if ("L", h) in match}
    has_prev = set(nxt.values())
    chains = []
    for h in walls:
        if h in has_prev:
            continue
        chain = [h]
        while chain[-1] in nxt:
            chain.append(nxt[chain[-1]])
        chains.append(chain)
    return chains


def embed_interval(X: CubeComplex, x: int, y: int, rho: Rescaling) -> IntervalEmbedding:
    labels = X.pocset.labels
    walls = bits(x ^ y)
    verts = X.interval(x, y).vertex_list()
    crossed = {v: (v ^ x) & (x ^ y) for v in verts}

    def before(h, k):
        # every interval vertex past k is already past h
        return all((c >> h) & 1 for c in crossed.values() if (c >> k) & 1)

    chains = _chain_partition(walls, before)
    chains = [sorted(c, key=lambda h: -sum(1 for v in verts if (crossed[v] >> h) & 1)) for c in chains]
    chains.sort(key=lambda c: c[0])
    coords = {v: np.array([sum(rho(labels[h]) for h in c if (crossed[v] >> h) & 1) for c in chains],
                          dtype=float)
              for v in verts}
    where = {h: t for t, c in enumerate(chains) for h in c}
    raw = []
    for v in verts:
        for m in X.cubes_at(v):
            if m & ~(x ^ y) or any((crossed[v] >> h) & 1 for h in bits(m)):
                continue   # take each cube once, from its corner nearest x
            lo = coords[v].copy()
            hi = coords[v].copy()
            for h in bits(m):
                hi[where[h]] += rho(labels[h])
            raw.append((popcount(m), lo, hi))
    raw.sort(key=lambda b: -b[0])
    boxes: list[tuple[np.ndarray, np.ndarray]] = []
    for _, lo, hi in raw:
        if not any(np.all(L <= lo + 1e-12) and np.all(hi <= H + 1e-12) for L, H in boxes):
            boxes.append((lo, hi))
    return IntervalEmbedding(verts, chains, coords, boxes)


# ---------------------------------------------------------------- grid search

@dataclass
class GeodesicEstimate:
    value: float
    method: str
    tolerance: float
    path: list[list[float]]
    grid_values: list[float]

    def to_dict(self) -> dict:
        return {"value": round(self.value, 12), "method": self.method,
                "tolerance": self.tolerance,
                "path": [[round(t, 12) for t in p] for p in self.path],
                "grid_values": [round(g, 12) for g in self.grid_values]}


def _face_points(lo, hi, m: int) -> list[tuple]:
    axes = []
    for a, b in zip(lo, hi):
        n = max(1, int(round((b - a) * m))) if b > a else 0
        axes.append([a + (b - a) * t / n for t in range(n + 1)] if n else [a])
    return list(product(*axes))


def _grid_path(E: IntervalEmbedding, start: np.ndarray, goal: np.ndarray, m: int):
    boxes = E.boxes
    pts: dict[tuple, int] = {}

    def add(p):
        key = tuple(round(float(t), 12) for t in p)
        if key not in pts:
            pts[key] = len(pts)
        return pts[key]

    add(start)
    add(goal)
    for (L1, H1), (L2, H2) in combinations(boxes, 2):
        lo, hi = np.maximum(L1, L2), np.minimum(H1, H2)
        if np.all(lo <= hi + 1e-12):
            for p in _face_points(lo, np.maximum(lo, hi), m):
                add(p)
            if len(pts) > NODE_CAP:
                return None
    P = np.array(list(pts.keys()))
    rows, cols, vals = [], [], []
    members = []
    for lo, hi in boxes:
        inside = np.where(np.all((P >= lo - 1e-9) & (P <= hi + 1e-9), axis=1))[0]
        members.append(inside)
        if len(inside) < 2:
            continue
        Q = P[inside]
        D = np.sqrt(((Q[:, None, :] - Q[None, :, :]) ** 2).sum(-1))
        a, b = np.triu_indices(len(inside), 1)
        rows += list(inside[a])
        cols += list(inside[b])
        vals += list(D[a, b] + 1e-300)
    n = len(P)
    G = coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    dist, pred = dijkstra(G, directed=False, indices=0, return_predecessors=True)
    if not np.isfinite(dist[1]):
        raise DomainError("endpoints are not connected through the interval")
    path = [1]
    while path[-1] != 0:
        path.append(int(pred[path[-1]]))
    path.reverse()
    return float(dist[1]), P[path]


def _shared_box(E: IntervalEmbedding, p, q) -> tuple[np.ndarray, np.ndarray]:
    for lo, hi in E.boxes:
        if np.all(p >= lo - 1e-9) and np.all(p <= hi + 1e-9) and np.all(q >= lo - 1e-9) \
                and np.all(q <= hi + 1e-9):
            return lo, hi
    raise DomainError("grid path segment leaves every box")


def _tour(E: IntervalEmbedding, path: np.ndarray) -> tuple[float, np.ndarray]:
    """Slide interior break points within their face boxes to shorten the path (convex)."""
    if len(path) <= 2:
        return float(np.linalg.norm(path[-1] - path[0])), path
    segs = [_shared_box(E, path[i], path[i + 1]) for i in range(len(path) - 1)]
    bounds = []
    for i in range(1, len(path) - 1):
        lo = np.maximum(segs[i - 1][0], segs[i][0])
        hi = np.minimum(segs[i - 1][1], segs[i][1])
        bounds += list(zip(lo, hi))
    k = path.shape[1]
    a, b = path[0], path[-1]

    def f(z):
        pts = np.vstack([a, z.reshape(-1, k), b])
        diff = np.diff(pts, axis=0)
        lens = np.sqrt((diff ** 2).sum(1) + 1e-24)
        g = diff / lens[:, None]
        grad = g[:-1] - g[1:]
        return float(lens.sum()), grad.ravel()

    res = minimize(f, path[1:-1].ravel(), jac=True, method="L-BFGS-B", bounds=bounds,
                   options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 2000})
    pts = np.vstack([a, res.x.reshape(-1, k), b])
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum()), pts


def l2_distance(X: CubeComplex, x, y, rho: Rescaling | None = None, tol: float = 1e-6,
                max_levels: int = MAX_LEVELS) -> GeodesicEstimate:
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    rho = rho or Rescaling.uniform()
    x, y = X.vertex(x), X.vertex(y)
    if x == y:
        return GeodesicEstimate(0.0, "grid", 0.0, [], [0.0])
    E = embed_interval(X, x, y, rho)
    start, goal = E.coords[x], E.coords[y]
    grid_values: list[float] = []
    tours: list[float] = []
    best = (math.inf, None)
    for level in range(max_levels + 1):
        found = _grid_path(E, start, goal, 2 ** level)
        if found is None:
            break
        g, path = found
        t, tpath = _tour(E, path)
        if t > g:
            t, tpath = g, path
        grid_values.append(g)
        tours.append(t)
        if t < best[0]:
            best = (t, tpath)
        if level:
            gap = min(abs(grid_values[-2] - g), abs(tours[-2] - t))
            if gap < tol:
                return GeodesicEstimate(best[0], "touring-refined", gap,
                                        [list(map(float, p)) for p in best[1]], grid_values)
    raise ResourceLimitError(f"distance not certified to {tol} within {len(grid_values)} levels",
                             best=GeodesicEstimate(best[0], "touring-refined", math.inf,
                                                   [list(map(float, p)) for p in best[1]]
                                                   if best[1] is not None else [], grid_values))


# ---------------------------------------------------------------- wall counts

def wall_count_check(X: CubeComplex, rho: Rescaling | None = None, tol: float = 1e-3) -> dict:
    """Fit (1/l0) d - l1 <= |W(x, y)| <= l0 d + l1 over all vertex pairs (with l1 = 0)."""
    rho = rho or Rescaling.uniform()
    labels = X.pocset.labels
    m, M = validate_rescaling(rho, labels)["m"], validate_rescaling(rho, labels)["M"]
    dim = max(1, X.dimension)
    lam0 = 1.0
    worst = None
    ok_l1 = True
    ok_identity = True
    for x, y in combinations(sorted(X.vertices), 2):
        d = l2_distance(X, x, y, rho, tol).value
        w = popcount(x ^ y)
        d1 = sum(rho(labels[h]) for h in bits(x ^ y))
        ratio = max(w / d, d / w)
        if ratio > lam0:
            lam0, worst = ratio, (X.name(x), X.name(y))
        slack = 2 * tol * math.sqrt(dim)
        if not (d <= d1 + slack and d1 <= math.sqrt(dim) * d + slack):
            ok_l1 = False
        if rho.lengths:
            d0 = l2_distance(X, x, y, None, tol).value
            if not (m / math.sqrt(dim) * d0 - slack <= d <= M * math.sqrt(dim) * d0 + slack):
                ok_identity = False
    return {"lambda0": lam0, "lambda1": 0.0, "worst_pair": list(worst) if worst else None,
            "dimension": dim, "m": m, "M": M, "l1_bounds": ok_l1, "identity_bilipschitz": ok_identity,
            "pairs": len(X.vertices) * (len(X.vertices) - 1) // 2, "tol": tol,
            "pass": ok_l1 and ok_identity}
