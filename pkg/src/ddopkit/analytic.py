"""Closed-form localization metrics for each pulse family.

Only the mean values and the two dispersions are stored; the area and the
direction parameter are recomputed properties of LocalizationMetrics, so the
identities tf_area = Delta T * Delta F and direction = Delta T / Delta F hold
to machine precision by construction.

Coefficient conventions (beta is the sub-pulse roll-off):

* root-raised-cosine train:   Delta F = (M/T) * sqrt(1/12 + c_rrc * beta^2),
  c_rrc = (pi^2 - 8)/(4 pi^2) ~ 0.04736
* exponential-rolloff train:  Delta F = (M/T) * sqrt(1/12 + c_exp * beta^2),
  c_exp = (ln(2) - 1)^2 / (2 ln^2(2)) ~ 0.09799; integrating f^2 against the
  piecewise spectrum term by term gives M^2/(12 T^2) + M^2 beta^2 c_exp / T^2
  exactly (the beta and beta^3 terms cancel)
* both trains:                Delta T = N*T/sqrt(12) (the rectangular envelope
  dominates the sub-pulse spread; exact up to about 1/(2 N^2) relative)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .metrics import LocalizationMetrics, Provenance
from .pulses import PulseFamily, PulseSpec
from .signal_core import InvalidInputError

__all__ = [
    "AnalyticConfig",
    "RRC_ROLLOFF_COEFF",
    "EXP_ROLLOFF_COEFF",
    "ddop_metrics",
    "tdm_metrics",
    "fdm_metrics",
    "general_ddop_metrics",
    "btrrc_ddop_metrics",
    "otfs_metrics",
    "gabor_limit",
    "analytic_for",
]

RRC_ROLLOFF_COEFF = (math.pi**2 - 8.0) / (4.0 * math.pi**2)
EXP_ROLLOFF_COEFF = (math.log(2.0) - 1.0) ** 2 / (2.0 * math.log(2.0) ** 2)


@dataclass(frozen=True)
class AnalyticConfig:
    """K_cutoff counts the sinc half-lobes of the rectangle spectrum kept in band."""

    K_cutoff: int

    def __post_init__(self) -> None:
        if int(self.K_cutoff) != self.K_cutoff or self.K_cutoff < 1:
            raise InvalidInputError(f"K_cutoff must be a positive integer, got {self.K_cutoff}")


def _require(spec: PulseSpec, family: PulseFamily, op: str) -> None:
    if spec.family is not family:
        raise InvalidInputError(f"{op} requires family {family.value}, got {spec.family.value}")


def _analytic(mean_time: float, mean_freq: float, dt: float, df: float, bound: bool = False) -> LocalizationMetrics:
    return LocalizationMetrics(
        mean_time=mean_time,
        mean_freq=mean_freq,
        time_dispersion=dt,
        freq_dispersion=df,
        provenance=Provenance.ANALYTIC,
        time_dispersion_is_bound=bound,
    )


def _train_freq_dispersion(spec: PulseSpec, coeff: float) -> float:
    return (spec.M / spec.T) * math.sqrt(1.0 / 12.0 + coeff * spec.beta**2)


def ddop_metrics(spec: PulseSpec) -> LocalizationMetrics:
    """Closed forms for the N-sub-pulse train with root-raised-cosine sub-pulse."""
    _require(spec, PulseFamily.DDOP, "ddop_metrics")
    return _analytic(
        mean_time=(spec.T * (spec.N - 1) + spec.ta) / 2.0,
        mean_freq=0.0,
        dt=spec.N * spec.T / math.sqrt(12.0),
        df=_train_freq_dispersion(spec, RRC_ROLLOFF_COEFF),
    )


def tdm_metrics(spec: PulseSpec) -> LocalizationMetrics:
    """Closed forms for the single sub-pulse; its Delta T is an upper bound."""
    if spec.family not in (PulseFamily.TDM, PulseFamily.RRC_SUBPULSE):
        raise InvalidInputError(f"tdm_metrics requires family TDM, got {spec.family.value}")
    mean_time = spec.ta / 2.0 if spec.family is PulseFamily.TDM else 0.0
    return _analytic(
        mean_time=mean_time,
        mean_freq=0.0,
        dt=spec.T * math.sqrt(spec.Q) / (spec.M * math.pi),
        df=_train_freq_dispersion(spec, RRC_ROLLOFF_COEFF),
        bound=True,
    )


def fdm_metrics(spec: PulseSpec, cfg: AnalyticConfig) -> LocalizationMetrics:
    """Closed forms for the duration-N*T rectangle, K_cutoff sinc half-lobes in band."""
    _require(spec, PulseFamily.FDM, "fdm_metrics")
    nt = spec.N * spec.T
    return _analytic(
        mean_time=nt / 2.0,
        mean_freq=0.0,
        dt=nt / math.sqrt(12.0),
        df=math.sqrt(cfg.K_cutoff) / (nt * math.pi),
    )


def general_ddop_metrics(spec: PulseSpec) -> LocalizationMetrics:
    """Extended-train closed forms: N replaced by N + 2D; Delta F unchanged."""
    _require(spec, PulseFamily.GENERAL_DDOP, "general_ddop_metrics")
    n_eff = spec.N + 2 * spec.D
    return _analytic(
        mean_time=(spec.T * (n_eff - 1) + spec.ta) / 2.0,
        mean_freq=0.0,
        dt=n_eff * spec.T / math.sqrt(12.0),
        df=_train_freq_dispersion(spec, RRC_ROLLOFF_COEFF),
    )


def btrrc_ddop_metrics(spec: PulseSpec) -> LocalizationMetrics:
    """Closed forms for the train built on the exponential-rolloff sub-pulse."""
    _require(spec, PulseFamily.DDOP, "btrrc_ddop_metrics")
    return _analytic(
        mean_time=(spec.T * (spec.N - 1) + spec.ta) / 2.0,
        mean_freq=0.0,
        dt=spec.N * spec.T / math.sqrt(12.0),
        df=_train_freq_dispersion(spec, EXP_ROLLOFF_COEFF),
    )


def otfs_metrics(spec: PulseSpec) -> LocalizationMetrics:
    """Closed forms for the multicarrier basis function.

    Valid for interior delay indices only (1 <= otfs_m <= M-2): the edge
    indices put the kernel peak on a window edge and the out-of-band leakage
    invalidates the closed forms. Callers comparing numeric metrics must
    exclude otfs_m in {0, M-1}.

    Means are support/comb centers: the kernel peaks average to
    (N-1)T/2 + m*T/M in time, and the kernel's tone comb is centered at
    (M-1)/(2T) shifted by the Doppler index n/(N*T).
    """
    _require(spec, PulseFamily.OTFS_BASIS, "otfs_metrics")
    return _analytic(
        mean_time=(spec.N - 1) * spec.T / 2.0 + spec.otfs_m * spec.T / spec.M,
        mean_freq=(spec.M - 1) / (2.0 * spec.T) + spec.otfs_n / (spec.N * spec.T),
        dt=spec.N * spec.T / math.sqrt(12.0),
        df=spec.M / (spec.T * math.sqrt(12.0)),
    )


def gabor_limit() -> float:
    """Lower bound on the time-frequency area, 1/(4*pi)."""
    return 1.0 / (4.0 * math.pi)


def analytic_for(
    spec: PulseSpec, cfg: AnalyticConfig | None = None, subpulse: str = "rrc"
) -> LocalizationMetrics:
    """Closed-form benchmark matching what synth_pulse would build for this spec."""
    if spec.family is PulseFamily.DDOP:
        return btrrc_ddop_metrics(spec) if subpulse == "btrrc" else ddop_metrics(spec)
    if spec.family is PulseFamily.GENERAL_DDOP:
        return general_ddop_metrics(spec)
    if spec.family in (PulseFamily.TDM, PulseFamily.RRC_SUBPULSE):
        return tdm_metrics(spec)
    if spec.family is PulseFamily.FDM:
        if cfg is None:
            raise InvalidInputError("FDM closed forms need an AnalyticConfig (K_cutoff)")
        return fdm_metrics(spec, cfg)
    if spec.family is PulseFamily.OTFS_BASIS:
        return otfs_metrics(spec)
    raise InvalidInputError(f"no closed-form benchmark for family {spec.family.value}")
