"""Parameter sweeps, family comparisons, and the fine-shift orthogonality scan.

A sweep varies one axis (roll-off, half-length, or the (M, N) pair) around a
fixed template spec, measures each point numerically, pairs it with the
matching closed form, and reports percent differences. Rows are computed
independently (worker threads, capped by the DDOP_THREADS environment
variable) but always emitted in plan order, and a point whose spec is illegal
becomes a "failed: ..." row instead of aborting the sweep.

Report serialization is fixed: a CSV with the header

    parameter,ΔT_num,ΔT_ana,ΔT_pct,ΔF_num,ΔF_ana,ΔF_pct,
    ΔA_num,ΔA_ana,ΔA_pct,κ_num,κ_ana,κ_pct,energy_capture,status

(single line) and a JSON array of row objects with identical field names.
Floats are written with 12 significant digits so identical plans produce
byte-identical files. Families whose closed-form time dispersion is only an
upper bound report the ΔT comparison as the boolean "numeric <= bound".
"""

from __future__ import annotations

import enum
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analytic import AnalyticConfig, analytic_for
from .metrics import AnalysisBand, LocalizationMetrics, measure_all
from .pulses import PulseFamily, PulseSpec, default_q, pulse_grid, synth_pulse
from .signal_core import InvalidInputError, energy

__all__ = [
    "SweptParameter",
    "SweepPlan",
    "SweepRow",
    "SweepReport",
    "REPORT_HEADER",
    "worker_count",
    "default_beta_values",
    "default_q_values",
    "default_mn_values",
    "run_sweep",
    "compare_families",
    "orthogonality_scan",
]

REPORT_HEADER = (
    "parameter,ΔT_num,ΔT_ana,ΔT_pct,ΔF_num,ΔF_ana,ΔF_pct,"
    "ΔA_num,ΔA_ana,ΔA_pct,κ_num,κ_ana,κ_pct,energy_capture,status"
)


class SweptParameter(enum.Enum):
    BETA = "beta"
    Q = "q"
    M_N_PAIR = "mn"


def worker_count() -> int:
    """Worker cap from DDOP_THREADS; 0 or unset means one per CPU."""
    raw = os.environ.get("DDOP_THREADS", "0").strip()
    try:
        n = int(raw)
    except ValueError:
        raise InvalidInputError(f"DDOP_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise InvalidInputError(f"DDOP_THREADS must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def default_beta_values() -> list[float]:
    return [i / 10 for i in range(11)]


def default_q_values(M: int, count: int = 13) -> list[int]:
    """Log-spaced integer half-lengths from ceil(0.01*M) up to M."""
    lo = max(1, math.ceil(0.01 * M))
    vals = np.geomspace(lo, M, num=count)
    out = sorted({int(round(v)) for v in vals})
    return out


def default_mn_values() -> list[tuple[int, int]]:
    return [(m, n) for m in (4, 8, 16, 32, 64, 128, 256) for n in (4, 8, 16, 32, 64)]


@dataclass(frozen=True)
class SweepPlan:
    """One swept axis around a fixed template.

    band=None resolves per point to the default +-5M/T (the (M, N) axis
    changes M, so a single fixed band would skew small-M rows). For the
    M_N_PAIR axis each point's Q is recomputed as default_q(M): the template's
    Q cannot be legal across the whole grid.
    """

    family: PulseFamily
    swept_parameter: SweptParameter
    values: tuple
    fixed: PulseSpec
    band: AnalysisBand | None = None
    zero_pad: int = 4
    oversample: int = 16
    subpulse: str = "rrc"

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise InvalidInputError("sweep values must be non-empty")
        if all(isinstance(v, (int, float)) for v in self.values):
            diffs = np.diff([float(v) for v in self.values])
            if len(diffs) and not np.all(diffs > 0):
                raise InvalidInputError("numeric sweep values must be strictly increasing")
        if self.zero_pad < 1:
            raise InvalidInputError(f"zero_pad must be >= 1, got {self.zero_pad}")
        if self.oversample < 1:
            raise InvalidInputError(f"oversample must be >= 1, got {self.oversample}")
        if self.subpulse not in ("rrc", "btrrc"):
            raise InvalidInputError(f"subpulse must be 'rrc' or 'btrrc', got {self.subpulse!r}")

    def spec_at(self, value) -> PulseSpec:
        if self.swept_parameter is SweptParameter.BETA:
            return replace(self.fixed, family=self.family, beta=float(value))
        if self.swept_parameter is SweptParameter.Q:
            return replace(self.fixed, family=self.family, Q=int(value))
        m, n = value
        return replace(self.fixed, family=self.family, M=int(m), N=int(n), Q=default_q(int(m)))

    def label_at(self, value) -> str:
        if self.swept_parameter is SweptParameter.M_N_PAIR:
            m, n = value
            return f"{int(m)}x{int(n)}"
        if self.swept_parameter is SweptParameter.Q:
            return _fmt(int(value))
        return _fmt(float(value))


@dataclass(frozen=True)
class SweepRow:
    parameter: str
    numeric: LocalizationMetrics | None
    analytic: LocalizationMetrics | None
    status: str = "ok"

    @property
    def percent_diff(self) -> dict:
        """Per-metric 100*|num-ana|/ana; ΔT becomes 'numeric <= bound' when bounded."""
        if self.numeric is None or self.analytic is None:
            return {"dT": None, "dF": None, "dA": None, "k": None}
        pairs = {
            "dT": (self.numeric.time_dispersion, self.analytic.time_dispersion),
            "dF": (self.numeric.freq_dispersion, self.analytic.freq_dispersion),
            "dA": (self.numeric.tf_area, self.analytic.tf_area),
            "k": (self.numeric.direction, self.analytic.direction),
        }
        out = {}
        for key, (num, ana) in pairs.items():
            if key == "dT" and self.analytic.time_dispersion_is_bound:
                out[key] = bool(num <= ana)
            else:
                out[key] = 100.0 * abs(num - ana) / ana if ana != 0 else None
        return out

    @property
    def energy_capture(self) -> float | None:
        return None if self.numeric is None else self.numeric.energy_capture

    def to_json_dict(self) -> dict:
        pct = self.percent_diff
        num, ana = self.numeric, self.analytic
        return {
            "parameter": self.parameter,
            "ΔT_num": None if num is None else num.time_dispersion,
            "ΔT_ana": None if ana is None else ana.time_dispersion,
            "ΔT_pct": pct["dT"],
            "ΔF_num": None if num is None else num.freq_dispersion,
            "ΔF_ana": None if ana is None else ana.freq_dispersion,
            "ΔF_pct": pct["dF"],
            "ΔA_num": None if num is None else num.tf_area,
            "ΔA_ana": None if ana is None else ana.tf_area,
            "ΔA_pct": pct["dA"],
            "κ_num": None if num is None else num.direction,
            "κ_ana": None if ana is None else ana.direction,
            "κ_pct": pct["k"],
            "energy_capture": self.energy_capture,
            "status": self.status,
        }


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    return format(value, ".12g")


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))

    def max_percent_diff(self, key: str) -> float:
        """Largest percent difference for one of dT/dF/dA/k across ok rows."""
        vals = [
            r.percent_diff[key]
            for r in self.rows
            if r.status == "ok" and isinstance(r.percent_diff[key], float)
        ]
        if not vals:
            raise InvalidInputError(f"no comparable rows for metric {key!r}")
        return max(vals)

    def to_csv(self) -> str:
        lines = [REPORT_HEADER]
        for row in self.rows:
            d = row.to_json_dict()
            cells = [d["parameter"]]
            cells += [_fmt(d[k]) for k in REPORT_HEADER.split(",")[1:-1]]
            cells.append(d["status"])
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps([r.to_json_dict() for r in self.rows], ensure_ascii=False, indent=2) + "\n"

    def write(self, path: str, output_format: str = "csv") -> None:
        text = self.to_csv() if output_format == "csv" else self.to_json()
        with io.open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _fdm_config(spec: PulseSpec, band: AnalysisBand, oversample: int) -> AnalyticConfig:
    # K counts sinc half-lobes the measurement can actually see: the band,
    # clipped to the sampled Nyquist range.
    nyquist = 0.5 * spec.M * oversample / spec.T
    visible = min(band.half_width, nyquist)
    return AnalyticConfig(K_cutoff=max(1, math.floor(visible * spec.N * spec.T)))


def _measure_point(
    spec: PulseSpec,
    band: AnalysisBand | None,
    zero_pad: int,
    oversample: int,
    subpulse: str = "rrc",
) -> tuple[LocalizationMetrics, LocalizationMetrics]:
    resolved = band if band is not None else AnalysisBand.default_for(spec)
    signal = synth_pulse(spec, oversample=oversample, subpulse=subpulse)
    numeric = measure_all(signal, resolved, zero_pad=zero_pad)
    cfg = _fdm_config(spec, resolved, oversample) if spec.family is PulseFamily.FDM else None
    analytic = analytic_for(spec, cfg=cfg, subpulse=subpulse)
    return numeric, analytic


def run_sweep(plan: SweepPlan) -> SweepReport:
    """Measure every point of the plan; failed points become rows, not raises."""

    def one(value) -> SweepRow:
        label = plan.label_at(value)
        try:
            spec = plan.spec_at(value)
            numeric, analytic = _measure_point(
                spec, plan.band, plan.zero_pad, plan.oversample, plan.subpulse
            )
        except ValueError as exc:
            return SweepRow(parameter=label, numeric=None, analytic=None,
                            status=f"failed: {exc}")
        return SweepRow(parameter=label, numeric=numeric, analytic=analytic)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        rows = list(pool.map(one, plan.values))
    return SweepReport(rows=tuple(rows))


def compare_families(
    specs: list[PulseSpec],
    band: AnalysisBand | None = None,
    zero_pad: int = 4,
    oversample: int = 16,
) -> SweepReport:
    """One row per spec, labeled by family, for side-by-side comparison."""
    rows = []
    for spec in specs:
        try:
            numeric, analytic = _measure_point(spec, band, zero_pad, oversample)
        except ValueError as exc:
            rows.append(SweepRow(parameter=spec.family.value, numeric=None,
                                 analytic=None, status=f"failed: {exc}"))
            continue
        rows.append(SweepRow(parameter=spec.family.value, numeric=numeric, analytic=analytic))
    return SweepReport(rows=tuple(rows))


def orthogonality_scan(
    spec: PulseSpec,
    max_delay_steps: int,
    max_doppler_steps: int,
    oversample: int = 16,
) -> np.ndarray:
    """|<u, u shifted by (m~ T/M, n~ /(NT))>| / ||u||^2 over the fine-shift grid.

    Returns a (2*max_delay_steps+1, 2*max_doppler_steps+1) matrix indexed by
    (m~ + max_delay_steps, n~ + max_doppler_steps). Delay shifts are exact
    integer sample shifts (T/M is oversample samples); each delay row then
    needs a single FFT because the Doppler correlations are the transform of
    u times the conjugated shifted signal, evaluated at multiples of 1/(NT).
    """
    if max_delay_steps < 0 or max_doppler_steps < 0:
        raise InvalidInputError("scan extents must be >= 0")
    grid = pulse_grid(spec, oversample=oversample, pad_steps=max_delay_steps)
    u = synth_pulse(spec, grid=grid, oversample=oversample)
    x = u.samples
    n = grid.num_samples
    dt = grid.sample_interval
    e0 = energy(u)

    # 1/(NT) must land on an FFT bin: bin spacing 1/(L2*dt) with L2 a multiple
    # of N*M*oversample puts n~/(NT) at bin n~*mult exactly.
    base = spec.N * spec.M * oversample
    mult = max(1, math.ceil(n / base))
    length = base * mult
    t_first = grid.start_time + 0.5 * dt

    out = np.empty((2 * max_delay_steps + 1, 2 * max_doppler_steps + 1))
    for im, m_shift in enumerate(range(-max_delay_steps, max_delay_steps + 1)):
        k = m_shift * oversample
        shifted = np.zeros_like(x)
        if k >= 0:
            shifted[k:] = x[: n - k] if k else x
        else:
            shifted[: n + k] = x[-k:]
        product = x * np.conj(shifted) * dt
        transform = np.fft.fft(product, length)
        for jn, n_shift in enumerate(range(-max_doppler_steps, max_doppler_steps + 1)):
            f_dop = n_shift / (spec.N * spec.T)
            val = transform[(n_shift * mult) % length] * np.exp(-2j * np.pi * f_dop * t_first)
            out[im, jn] = abs(val) / e0
    return out
