"""chaoskit: chaos detection in scalar series and forced-oscillator identification.

The toolkit covers the full path from a raw series to a verdict on its
dynamics: Fourier decomposition with a cumulative-periodogram white-noise
screen, correlation-dimension and surrogate-data nonlinearity tests,
nearest-neighbor Lyapunov estimation, and per-window identification of a
forced cubic oscillator whose simulated exponents are compared against the
empirical ones.
"""

from .series import TimeSeries, WindowSpec, autocorrelation, difference, load_csv, sliding_windows
from .spectral import (
    CubicHarmonics,
    DurbinResult,
    HarmonicPair,
    Periodogram,
    SpectralDecomposition,
    cubic_harmonics,
    decompose,
    dominant_frequencies,
    durbin_test,
    harmonic_pair_fit,
    periodogram,
    reconstruct,
)
from .complexity import (
    CorrelationDimension,
    EmbeddedTrajectory,
    SurrogateTest,
    correlation_sum,
    embed,
    phase_randomized_surrogates,
    z_score,
)
from .lyapunov import DivergenceCurve, RosensteinLyapunov, select_delay
from .market import CubicPriceStock, MeanReversion, potential_shape, quartic_potential
from .duffing import (
    DuffingParams,
    HarmonicBalanceFit,
    LyapunovSpectrum,
    SimulationResult,
    classify,
    classify_exponent,
    gram_schmidt,
    harmonic_balance_fit,
    lyapunov_spectrum,
    simulate,
)
from .pipeline import (
    RunConfig,
    WindowReport,
    agreement_summary,
    emit_outputs,
    fit_scale_factor,
    run_pipeline,
)

__version__ = "0.1.0"
