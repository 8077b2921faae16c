"""scikit-learn style front ends.

These wrap the functional API so the pipeline composes with the usual
``fit`` / ``transform`` / ``fit_predict`` tooling and ``get_params``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_record, check_series_matrix, check_square
from .cluster import agglomerate, cut, select_k, silhouette
from .distances import DissimilarityMatrix, MeasureConfig, build_matrix, get_measure
from .segment import SegmentConfig, segment
from .spectra import DEFAULT_BANDWIDTH, DEFAULT_N_FREQ, frequency_grid, normalize, parzen_spectrum
from .timeseries import WAVE_DT, TimeSeries


class NormalizedSpectrumTransformer(TransformerMixin, BaseEstimator):
    """Map each row (a series) to its normalized Parzen spectral density.

    Parameters
    ----------
    bandwidth : int, default=100
        Parzen truncation lag, capped at ``T - 1`` for short rows.
    n_freq : int, default=513
        Number of points of the output grid on ``[0, π]``.

    Attributes
    ----------
    grid_ : ndarray of shape (n_freq,)
        Frequencies (rad/sample) of the output columns.
    """

    def __init__(self, bandwidth=DEFAULT_BANDWIDTH, n_freq=DEFAULT_N_FREQ):
        self.bandwidth = bandwidth
        self.n_freq = n_freq

    def fit(self, X, y=None):
        X = check_series_matrix(X)
        self.n_features_in_ = X.shape[1]
        self.grid_ = frequency_grid(self.n_freq)
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_series_matrix(X)
        bw = min(self.bandwidth, X.shape[1] - 1)
        return np.vstack([normalize(parzen_spectrum(row, bw, self.n_freq)).values for row in X])


class SpectralTVClustering(ClusterMixin, BaseEstimator):
    """Hierarchical clustering of series by the distance between their spectra.

    Parameters
    ----------
    n_clusters : int or None, default=None
        Number of clusters. ``None`` picks it by Dunn's index over ``k_range``.
    linkage : {"complete", "average"}, default="complete"
    measure : str, default="TV"
        Any registered dissimilarity, or ``"precomputed"`` to pass a square
        dissimilarity matrix as ``X``.
    bandwidth : int, default=100
    k_range : iterable of int, default=range(2, 11)
    n_jobs : int or None, default=None
        Parallelism for the pairwise dissimilarities.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
    n_clusters_ : int
    dissimilarity_ : DissimilarityMatrix
    dendrogram_ : Dendrogram
    validity_ : ValidityReport or None
        Dunn's index per candidate ``k`` and silhouettes, when ``n_clusters`` is None.
    silhouette_ : ndarray of shape (n_samples,)

    Examples
    --------
    >>> import numpy as np
    >>> from tvspec.simulate import ArimaModel, simulate_arima
    >>> X = np.vstack([simulate_arima(ArimaModel(ar=(phi,)), 300, s).samples
    ...                for s, phi in enumerate([0.9, 0.9, 0.9, -0.9, -0.9, -0.9])])
    >>> SpectralTVClustering(n_clusters=2).fit(X).labels_
    array([0, 0, 0, 1, 1, 1])
    """

    def __init__(
        self, n_clusters=None, linkage="complete", measure="TV", bandwidth=DEFAULT_BANDWIDTH, k_range=range(2, 11), n_jobs=None
    ):
        self.n_clusters = n_clusters
        self.linkage = linkage
        self.measure = measure
        self.bandwidth = bandwidth
        self.k_range = k_range
        self.n_jobs = n_jobs

    def _dissimilarity(self, X):
        if self.measure == "precomputed":
            return DissimilarityMatrix(check_square(X), measure="precomputed")
        name = get_measure(self.measure).name
        X = check_series_matrix(X)
        self.n_features_in_ = X.shape[1]
        series = [TimeSeries(row) for row in X]
        return build_matrix(series, name, MeasureConfig(bandwidth=self.bandwidth), n_jobs=self.n_jobs)

    def fit(self, X, y=None):
        matrix = self._dissimilarity(X)
        n = matrix.n
        dend = agglomerate(matrix, self.linkage)
        if self.n_clusters is None:
            ks = [k for k in self.k_range if 2 <= k <= n - 1]
            if not ks:
                raise ValueError(f"no candidate k in k_range fits {n} items")
            k, self.validity_ = select_k(dend, matrix, ks)
        else:
            k = int(self.n_clusters)
            if not 1 <= k <= n:
                raise ValueError(f"n_clusters must lie in [1, {n}]")
            self.validity_ = None
        partition = cut(dend, k)
        self.dissimilarity_ = matrix
        self.dendrogram_ = dend
        self.n_clusters_ = k
        self.labels_ = partition.labels.copy()
        self.silhouette_ = silhouette(partition, matrix) if 2 <= k < n else np.zeros(n)
        return self


class SeaStateSegmenter(BaseEstimator):
    """Split a wave record into stationary and transition periods.

    ``fit`` takes one record (1-D samples or a :class:`TimeSeries`) and
    stores the :class:`SegmentationReport` in ``report_``;
    ``labels_`` holds the per-window cluster labels (``-1`` for excluded
    windows).
    """

    def __init__(
        self,
        dt=WAVE_DT,
        window_len_s=1800.0,
        linkage="average",
        k_range=range(2, 11),
        n_clusters=None,
        min_run=3,
        bandwidth=DEFAULT_BANDWIDTH,
        revise=True,
        min_silhouette=0.5,
    ):
        self.dt = dt
        self.window_len_s = window_len_s
        self.linkage = linkage
        self.k_range = k_range
        self.n_clusters = n_clusters
        self.min_run = min_run
        self.bandwidth = bandwidth
        self.revise = revise
        self.min_silhouette = min_silhouette

    def _config(self):
        return SegmentConfig(
            window_len_s=self.window_len_s,
            bandwidth=self.bandwidth,
            linkage=self.linkage,
            k_range=tuple(self.k_range),
            k=self.n_clusters,
            min_run=self.min_run,
            revise=self.revise,
            min_silhouette=self.min_silhouette,
        )

    def fit(self, X, y=None):
        ts = X if isinstance(X, TimeSeries) else TimeSeries(check_record(X), self.dt)
        self.report_ = segment(ts, self._config())
        self.labels_ = self.report_.labels
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_
