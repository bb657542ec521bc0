"""Delay-Doppler pulse-train synthesis and time-frequency localization analysis.

Submodules:

* ``signal_core``: sampled-signal containers, energies, Parseval-exact DFT.
* ``pulses``: synthesizers for every pulse family and their closed-form spectra.
* ``metrics``: numeric localization measurements and the moment-shift identity check.
* ``analytic``: closed-form localization metrics per family.
* ``experiments``: parameter sweeps, family comparisons, orthogonality scans.
* ``cli``: command-line interface (``ddopkit synth|metrics|sweep|verify``).
"""

from .analytic import (
    AnalyticConfig,
    btrrc_ddop_metrics,
    ddop_metrics,
    fdm_metrics,
    gabor_limit,
    general_ddop_metrics,
    otfs_metrics,
    tdm_metrics,
)
from .metrics import AnalysisBand, LocalizationMetrics, Provenance, lemma1_check, measure_all, measure_freq, measure_time
from .pulses import PulseFamily, PulseSpec, default_q, pulse_grid, synth_pulse
from .signal_core import (
    DegenerateInputError,
    GridMismatchError,
    InvalidGridError,
    InvalidInputError,
    SampledSignal,
    Spectrum,
    TimeGrid,
    dft_spectrum,
    energy,
    inner_product,
    spectral_energy,
)

__version__ = "0.1.0"
