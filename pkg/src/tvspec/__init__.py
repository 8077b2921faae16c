"""Clustering of time series by the total variation distance between their
normalized spectral densities, with benchmark replications and a sea-state
segmenter for long wave records."""

from .cluster import (
    Dendrogram,
    Partition,
    ValidityReport,
    agglomerate,
    cut,
    davies_bouldin,
    dunn_index,
    select_k,
    silhouette,
    silhouette_revision,
    sim_index,
)
from .distances import (
    MEASURES,
    DissimilarityMatrix,
    MeasureConfig,
    acf_distance,
    build_matrix,
    cepstral_distance,
    distance,
    isd_distance,
    kl_divergence,
    l1_log_distance,
    periodogram_distance,
    tv_distance,
    w_disparity,
)
from .estimators import NormalizedSpectrumTransformer, SeaStateSegmenter, SpectralTVClustering
from .exceptions import DegenerateInputError, FormatError
from .segment import SegmentationReport, SegmentConfig, segment, window_split
from .simulate import (
    ArimaModel,
    JonswapParams,
    TorsethaugenParams,
    TransitionScenario,
    arma_spectrum,
    default_scenario,
    jonswap_spectrum,
    simulate_arima,
    simulate_from_spectrum,
    simulate_transition_record,
    torsethaugen_spectrum,
)
from .spectra import SpectralDensity, acf, cepstral_coeffs, normalize, parzen_spectrum, periodogram, regrid
from .timeseries import TimeSeries

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
