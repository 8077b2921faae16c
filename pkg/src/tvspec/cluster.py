"""Agglomerative clustering on a dissimilarity matrix, partitions,
validity indices and the Sim agreement index."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distances import DissimilarityMatrix

LINKAGES = ("complete", "average")


def _as_matrix(m):
    if isinstance(m, DissimilarityMatrix):
        return m.d
    return DissimilarityMatrix(np.asarray(m, dtype=float)).d


@dataclass(frozen=True)
class Dendrogram:
    """Merge tree in the usual leaf-then-internal numbering.

    Leaves are ``0..n-1``; the cluster created by merge ``i`` gets id ``n + i``.
    Each merge is ``(a, b, height, size)`` with ``a < b``.
    """

    merges: tuple
    n_leaves: int
    linkage: str = "complete"

    def heights(self):
        return np.array([h for _, _, h, _ in self.merges])

    def to_dict(self):
        return {
            "n_leaves": self.n_leaves,
            "linkage": self.linkage,
            "merges": [[int(a), int(b), float(h), int(s)] for a, b, h, s in self.merges],
        }

    @classmethod
    def from_dict(cls, data):
        merges = tuple((int(a), int(b), float(h), int(s)) for a, b, h, s in data["merges"])
        return cls(merges=merges, n_leaves=int(data["n_leaves"]), linkage=data.get("linkage", "complete"))


def agglomerate(m, linkage="complete"):
    """Agglomerative hierarchical clustering with complete or average linkage.

    Ties between equal inter-cluster distances go to the pair with the
    smallest ``(min id, max id)``.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}")
    d = _as_matrix(m).copy()
    n = d.shape[0]
    if n < 2:
        raise ValueError("need at least 2 items to cluster")
    ids = list(range(n))
    sizes = [1] * n
    active = np.ones(n, dtype=bool)
    np.fill_diagonal(d, np.inf)
    merges = []
    for step in range(n - 1):
        sub = np.where(active[:, None] & active[None, :], d, np.inf)
        h = sub.min()
        rows, cols = np.nonzero(sub == h)
        best = None
        for r, c in zip(rows, cols):
            if r < c:
                key = (min(ids[r], ids[c]), max(ids[r], ids[c]))
                if best is None or key < best[0]:
                    best = (key, r, c)
        (a_id, b_id), r, c = best
        na, nb = sizes[r], sizes[c]
        if linkage == "complete":
            new = np.maximum(d[r], d[c])
        else:
            new = (na * d[r] + nb * d[c]) / (na + nb)
        # slot r holds the merged cluster, slot c retires
        d[r, :] = new
        d[:, r] = new
        d[r, r] = np.inf
        active[c] = False
        sizes[r] = na + nb
        ids[r] = n + step
        merges.append((a_id, b_id, float(h), na + nb))
    return Dendrogram(merges=tuple(merges), n_leaves=n, linkage=linkage)


@dataclass(frozen=True)
class Partition:
    """Cluster labels ``0..k-1``, one per item, every cluster nonempty."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a nonempty 1-D array")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(labels == np.round(labels)):
                raise ValueError("labels must be integers")
            labels = labels.astype(int)
        k = int(labels.max()) + 1
        if labels.min() < 0 or np.unique(labels).size != k:
            raise ValueError("labels must cover 0..k-1 with no empty cluster")
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def k(self):
        return int(self.labels.max()) + 1

    @property
    def n(self):
        return self.labels.size

    def clusters(self):
        return [np.flatnonzero(self.labels == c) for c in range(self.k)]

    @classmethod
    def from_labels(cls, labels):
        """Relabel arbitrary hashable labels as ``0..k-1`` in order of first occurrence."""
        mapping = {}
        out = [mapping.setdefault(lab, len(mapping)) for lab in labels]
        return cls(np.array(out, dtype=int))

    @classmethod
    def from_groups(cls, groups, n=None):
        """Build from a list of index groups."""
        n = n if n is not None else sum(len(g) for g in groups)
        labels = np.full(n, -1)
        for c, g in enumerate(groups):
            labels[list(g)] = c
        if np.any(labels < 0):
            raise ValueError("groups do not cover every item")
        return cls(labels)


def cut(dendrogram, k):
    """Partition left after undoing the last ``k - 1`` merges.

    Labels are numbered by first occurrence in item order.
    """
    n = dendrogram.n_leaves
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    parent = list(range(2 * n - 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for step, (a, b, _, _) in enumerate(dendrogram.merges[: n - k]):
        parent[find(a)] = n + step
        parent[find(b)] = n + step
    return Partition.from_labels([find(i) for i in range(n)])


def _mean_block(d, rows, cols):
    return float(d[np.ix_(rows, cols)].mean())


def _diameter(d, members):
    if members.size < 2:
        return 0.0
    block = d[np.ix_(members, members)]
    return float(block.sum() / (members.size * (members.size - 1)))


def dunn_index(partition, m):
    """Dunn's index with average inter-cluster distance and average diameter.

    Returns ``inf`` when every cluster has zero diameter.
    """
    d = _as_matrix(m)
    if partition.k < 2:
        raise ValueError("Dunn's index needs at least 2 clusters")
    groups = partition.clusters()
    max_diam = max(_diameter(d, g) for g in groups)
    inter = min(
        _mean_block(d, groups[i], groups[j]) for i in range(len(groups)) for j in range(i + 1, len(groups))
    )
    if max_diam == 0:
        return float("inf")
    return inter / max_diam


def _ab(partition, d):
    """Own-cluster mean ``a``, nearest-other mean ``b`` and the cluster attaining ``b``."""
    labels = partition.labels
    n, k = labels.size, partition.k
    onehot = np.zeros((n, k))
    onehot[np.arange(n), labels] = 1.0
    sums = d @ onehot
    counts = onehot.sum(axis=0)
    own = counts[labels]
    a = np.where(own > 1, sums[np.arange(n), labels] / np.maximum(own - 1, 1), 0.0)
    means = sums / counts
    means[np.arange(n), labels] = np.inf
    nearest = means.argmin(axis=1)
    b = means[np.arange(n), nearest]
    return a, b, nearest, own


def silhouette(partition, m):
    """Silhouette ``s(i) = (b - a)/max(a, b)``; members of singleton clusters get 0."""
    d = _as_matrix(m)
    if partition.k < 2:
        raise ValueError("silhouette needs at least 2 clusters")
    a, b, _, own = _ab(partition, d)
    top = np.maximum(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(top > 0, (b - a) / top, 0.0)
    s[own == 1] = 0.0
    return np.clip(s, -1.0, 1.0)


@dataclass(frozen=True)
class RevisionInfo:
    moved: tuple = ()
    retained: tuple = ()
    rounds: int = 0


def silhouette_revision(partition, m, max_rounds=1, return_info=False):
    """Move items with negative silhouette to their nearest other cluster.

    Each round computes silhouettes once and then reassigns the negative
    items in index order; a move that would empty a cluster is skipped and
    the item is reported in ``retained``. Rounds repeat up to
    ``max_rounds`` times or until nothing moves.
    """
    d = _as_matrix(m)
    if partition.k < 2:
        raise ValueError("silhouette revision needs at least 2 clusters")
    labels = partition.labels.copy()
    moved, retained = [], []
    rounds = 0
    for _ in range(max_rounds):
        current = Partition(labels)
        s = silhouette(current, d)
        _, _, nearest, _ = _ab(current, d)
        neg = np.flatnonzero(s < 0)
        if neg.size == 0:
            break
        rounds += 1
        counts = np.bincount(labels, minlength=current.k)
        changed = False
        for i in neg:
            if counts[labels[i]] <= 1:
                retained.append(int(i))
                continue
            counts[labels[i]] -= 1
            counts[nearest[i]] += 1
            labels[i] = nearest[i]
            moved.append(int(i))
            changed = True
        if not changed:
            break
    out = Partition(labels)
    if return_info:
        return out, RevisionInfo(moved=tuple(moved), retained=tuple(sorted(set(retained))), rounds=rounds)
    return out


def davies_bouldin(partition, m):
    """Medoid-based Davies-Bouldin index for dissimilarity data (lower is better)."""
    d = _as_matrix(m)
    groups = partition.clusters()
    if len(groups) < 2:
        raise ValueError("Davies-Bouldin needs at least 2 clusters")
    medoids = [g[np.argmin(d[np.ix_(g, g)].sum(axis=1))] for g in groups]
    scatter = [float(d[med, g].mean()) for med, g in zip(medoids, groups)]
    worst = []
    for i in range(len(groups)):
        ratios = [
            (scatter[i] + scatter[j]) / d[medoids[i], medoids[j]] if d[medoids[i], medoids[j]] > 0 else np.inf
            for j in range(len(groups))
            if j != i
        ]
        worst.append(max(ratios))
    return float(np.mean(worst))


def sim_index(found, truth):
    """Average over true groups of the best Dice overlap ``2|C∩G|/(|C|+|G|)``."""
    if found.n != truth.n:
        raise ValueError("partitions cover different item sets")
    k, g = found.k, truth.k
    table = np.zeros((k, g))
    np.add.at(table, (found.labels, truth.labels), 1)
    sizes_c = table.sum(axis=1)[:, None]
    sizes_g = table.sum(axis=0)[None, :]
    sim = 2 * table / (sizes_c + sizes_g)
    return float(sim.max(axis=0).mean())


@dataclass(frozen=True)
class ValidityReport:
    """Dunn's index per candidate ``k`` and silhouettes at the chosen ``k``."""

    dunn: dict
    silhouette: np.ndarray = field(repr=False)
    chosen_k: int = 0
    davies_bouldin: dict = None

    def to_dict(self):
        out = {
            "dunn": {str(k): (None if not np.isfinite(v) else float(v)) for k, v in self.dunn.items()},
            "silhouette": [float(s) for s in self.silhouette],
            "chosen_k": int(self.chosen_k),
        }
        if self.davies_bouldin is not None:
            out["davies_bouldin"] = {str(k): float(v) for k, v in self.davies_bouldin.items()}
        return out


def select_k(dendrogram, m, k_range, with_davies_bouldin=False):
    """Pick ``k`` maximizing Dunn's index over ``k_range``; ties go to the smaller ``k``."""
    d = _as_matrix(m)
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise ValueError("k_range is empty")
    n = dendrogram.n_leaves
    if ks[0] < 2 or ks[-1] > n - 1:
        raise ValueError(f"k_range must lie within [2, {n - 1}]")
    dunn, db = {}, {}
    best_k, best_v = None, -np.inf
    for k in ks:
        p = cut(dendrogram, k)
        v = dunn_index(p, d)
        dunn[k] = v
        if with_davies_bouldin:
            db[k] = davies_bouldin(p, d)
        if v > best_v:
            best_k, best_v = k, v
    chosen = cut(dendrogram, best_k)
    report = ValidityReport(
        dunn=dunn,
        silhouette=silhouette(chosen, d),
        chosen_k=best_k,
        davies_bouldin=db if with_davies_bouldin else None,
    )
    return best_k, report
