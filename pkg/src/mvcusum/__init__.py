"""Offline multivariate change-point detection toolkit.

Detects a mean shift in d-dimensional dependent time series with a CUSUM
test studentized by a spectral long-run covariance estimate, against the
sup of a sum of squared independent Brownian bridges. Includes change-point
estimators, a multiple-change extrema scan, Monte Carlo critical values,
an m-dependent linear-process simulator, and a benchmark harness.
"""

from .errors import (
    BandwidthTooLarge,
    DegenerateSpectrum,
    DimensionMismatch,
    DomainError,
    GridParseError,
    MissingColumn,
    MissingCriticalValue,
    NonFinite,
    NonNumericCell,
    TooShort,
    ToolkitError,
)
from .spectral import (
    KernelWeights,
    LongRunCovariance,
    Periodogram,
    SpectralEstimate,
    default_bandwidth,
    dft,
    export_spectrum_csv,
    long_run_covariance,
    nearest_fourier,
    sma_kernel,
    smoothed_spectrum,
    spectral_estimate,
)
from .series import (
    CenteredSeries,
    IngestConfig,
    MultivariateSeries,
    ValidationReport,
    center,
    load_csv,
    validate,
    write_csv,
)
from .engine import (
    ChangePointEstimate,
    CusumCurve,
    ExtremaScan,
    Extremum,
    TestResult,
    cusum,
    estimate_changepoint,
    export_curve_csv,
    quadform,
    scan_extrema,
    test_result_text,
)
from .critical import (
    Budget,
    CriticalEntry,
    CriticalValueTable,
    critical_value,
    default_table,
    simulate_sup_bridges,
)
from .simulate import (
    CoefficientScheme,
    SimulationSpec,
    exchangeable_cov,
    gen_series,
    geometric_coefficients,
)
from .experiments import (
    ExperimentCell,
    ExperimentGrid,
    MetricsRow,
    load_grid,
    load_shipped_grid,
    metrics_from_errors,
    parse_grid,
    run_cell,
    run_grid,
)

__version__ = "0.1.0"
