"""Pulse-family synthesizers and closed-form frequency responses.

Families:

* ``RRC_SUBPULSE``: truncated root-raised-cosine sub-pulse on [-T_a/2, T_a/2],
  T_a = 2*Q*T/M.
* ``BTRRC_SUBPULSE``: sub-pulse with exponential spectral rolloff, defined by
  its closed-form spectrum and synthesized by inverse transform.
* ``DDOP``: train of N sub-pulses at spacing T, sub-pulse energy 1/N.
* ``GENERAL_DDOP``: train extended by D = ceil(2Q/M) prefix and suffix
  sub-pulses, sub-pulse energy 1/(N+2D).
* ``TDM``: a single unit-energy sub-pulse.
* ``FDM``: the unit-energy rectangle of duration N*T.
* ``OTFS_BASIS``: time-frequency multicarrier basis function for delay index
  otfs_m and Doppler index otfs_n.

Every synthesizer renormalizes its discrete Riemann energy to the requested
total (unit energy unless stated otherwise), is deterministic, and accepts an
arbitrary TimeGrid covering the pulse support.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .signal_core import (
    InvalidGridError,
    InvalidInputError,
    SampledSignal,
    TimeGrid,
    energy as signal_energy,
)

__all__ = [
    "PulseFamily",
    "PulseSpec",
    "default_q",
    "pulse_grid",
    "synth_rrc_subpulse",
    "eval_rrc_freq",
    "synth_btrrc_subpulse",
    "eval_btrrc_freq",
    "synth_ddop",
    "eval_ddop_freq",
    "synth_general_ddop",
    "synth_tdm",
    "synth_fdm",
    "synth_otfs_basis",
    "synth_pulse",
]


class PulseFamily(enum.Enum):
    RRC_SUBPULSE = "RRC_SUBPULSE"
    BTRRC_SUBPULSE = "BTRRC_SUBPULSE"
    DDOP = "DDOP"
    GENERAL_DDOP = "GENERAL_DDOP"
    TDM = "TDM"
    FDM = "FDM"
    OTFS_BASIS = "OTFS_BASIS"


# Short lowercase aliases accepted on the command line and in config files.
FAMILY_ALIASES = {
    "rrc": PulseFamily.RRC_SUBPULSE,
    "btrrc": PulseFamily.BTRRC_SUBPULSE,
    "ddop": PulseFamily.DDOP,
    "gddop": PulseFamily.GENERAL_DDOP,
    "tdm": PulseFamily.TDM,
    "fdm": PulseFamily.FDM,
    "otfs": PulseFamily.OTFS_BASIS,
}


def parse_family(name: str) -> PulseFamily:
    key = str(name).strip().lower()
    if key in FAMILY_ALIASES:
        return FAMILY_ALIASES[key]
    for fam in PulseFamily:
        if key == fam.value.lower():
            return fam
    raise InvalidInputError(f"unknown pulse family {name!r}")


def default_q(M: int) -> int:
    """Default half-length parameter, about 5% of M, at least 1."""
    return max(1, round(0.05 * M))


_SPEC_FIELDS = ("M", "N", "T", "beta", "Q", "family", "otfs_m", "otfs_n")


@dataclass(frozen=True)
class PulseSpec:
    """Parameter bundle defining one pulse.

    M delay bins, N Doppler bins (sub-pulses), symbol spacing T, roll-off
    beta in [0, 1], half-length Q (sub-pulse duration T_a = 2*Q*T/M), and the
    pulse family. otfs_m / otfs_n select the basis function for OTFS_BASIS.
    """

    M: int
    N: int
    T: float = 1.0
    beta: float = 0.1
    Q: int | None = None
    family: PulseFamily = PulseFamily.DDOP
    otfs_m: int = 0
    otfs_n: int = 0

    def __post_init__(self) -> None:
        if int(self.M) != self.M or self.M < 1:
            raise InvalidInputError(f"M must be a positive integer, got {self.M}")
        if int(self.N) != self.N or self.N < 1:
            raise InvalidInputError(f"N must be a positive integer, got {self.N}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "N", int(self.N))
        if not self.T > 0:
            raise InvalidInputError(f"T must be > 0, got {self.T}")
        if not 0.0 <= self.beta <= 1.0:
            raise InvalidInputError(f"beta must be in [0, 1], got {self.beta}")
        q = default_q(self.M) if self.Q is None else self.Q
        if int(q) != q or q < 1:
            raise InvalidInputError(f"Q must be a positive integer, got {self.Q}")
        object.__setattr__(self, "Q", int(q))
        if not isinstance(self.family, PulseFamily):
            object.__setattr__(self, "family", parse_family(self.family))
        if self.family is PulseFamily.DDOP and self.ta > 0.5 * self.T:
            raise InvalidInputError(
                f"sub-pulse duration T_a = 2*Q*T/M = {self.ta:g} exceeds 0.5*T = {0.5 * self.T:g}; "
                f"the plain pulse train requires T_a <= 0.5*T (got Q={self.Q}, M={self.M})"
            )
        if self.family is PulseFamily.OTFS_BASIS:
            if not 0 <= self.otfs_m <= self.M - 1:
                raise InvalidInputError(f"otfs_m must be in [0, {self.M - 1}], got {self.otfs_m}")
            if not 0 <= self.otfs_n <= self.N - 1:
                raise InvalidInputError(f"otfs_n must be in [0, {self.N - 1}], got {self.otfs_n}")

    @property
    def ta(self) -> float:
        """Sub-pulse duration T_a = 2*Q*T/M."""
        return 2.0 * self.Q * self.T / self.M

    @property
    def D(self) -> int:
        """Prefix/suffix sub-pulse count of the extended train, ceil(2Q/M)."""
        return -(-2 * self.Q // self.M)

    @property
    def delay_resolution(self) -> float:
        return self.T / self.M

    @property
    def doppler_resolution(self) -> float:
        return 1.0 / (self.N * self.T)

    def to_json_dict(self) -> dict:
        return {
            "M": self.M,
            "N": self.N,
            "T": self.T,
            "beta": self.beta,
            "Q": self.Q,
            "family": self.family.value,
            "otfs_m": self.otfs_m,
            "otfs_n": self.otfs_n,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PulseSpec":
        """Build from a JSON object; unknown fields are rejected."""
        unknown = set(data) - set(_SPEC_FIELDS)
        if unknown:
            raise InvalidInputError(f"unknown PulseSpec fields: {sorted(unknown)}")
        kwargs = dict(data)
        if "family" in kwargs:
            kwargs["family"] = parse_family(kwargs["family"])
        return cls(**kwargs)


def pulse_grid(spec: PulseSpec, oversample: int = 16, pad_steps: int = 0) -> TimeGrid:
    """Default grid for a family: dt = T/(M*oversample), exactly covering the support.

    pad_steps adds that many delay-resolution steps (T/M) of zeros on both
    sides; shift scans use this so delayed copies stay on the grid.
    """
    if int(oversample) != oversample or oversample < 1:
        raise InvalidInputError(f"oversample must be a positive integer, got {oversample}")
    oversample = int(oversample)
    # Support lengths in units of T/M (always an integer for these families).
    if spec.family in (PulseFamily.RRC_SUBPULSE, PulseFamily.BTRRC_SUBPULSE):
        units, start_units = 2 * spec.Q, -spec.Q
    elif spec.family is PulseFamily.DDOP:
        units, start_units = (spec.N - 1) * spec.M + 2 * spec.Q, 0
    elif spec.family is PulseFamily.GENERAL_DDOP:
        units, start_units = (spec.N + 2 * spec.D - 1) * spec.M + 2 * spec.Q, 0
    elif spec.family is PulseFamily.TDM:
        units, start_units = 2 * spec.Q, 0
    else:  # FDM, OTFS_BASIS
        units, start_units = spec.N * spec.M, 0
    step = spec.T / spec.M
    return TimeGrid(
        start_time=(start_units - pad_steps) * step,
        sample_interval=step / oversample,
        num_samples=oversample * (units + 2 * pad_steps),
    )


def _rrc_profile(x: np.ndarray, beta: float) -> np.ndarray:
    """Root-raised-cosine time profile in units x = M*t/T; amplitude scale excluded.

    Removable singularities at x = 0 and |x| = 1/(4*beta) are evaluated by
    their limits so aligned grids are safe.
    """
    x = np.asarray(x, dtype=np.float64)
    if beta == 0.0:
        return np.sinc(x)
    out = np.empty_like(x)
    at_zero = np.abs(x) < 1e-9
    at_pole = np.abs(np.abs(4.0 * beta * x) - 1.0) < 1e-9
    regular = ~(at_zero | at_pole)
    xr = x[regular]
    num = np.sin(np.pi * xr * (1.0 - beta)) + 4.0 * beta * xr * np.cos(np.pi * xr * (1.0 + beta))
    den = np.pi * xr * (1.0 - (4.0 * beta * xr) ** 2)
    out[regular] = num / den
    out[at_zero] = 1.0 - beta + 4.0 * beta / np.pi
    out[at_pole] = (beta / np.sqrt(2.0)) * (
        (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * beta))
        + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * beta))
    )
    return out


def _renormalized(grid: TimeGrid, samples: np.ndarray, target: float, what: str) -> SampledSignal:
    raw = float(np.real(np.vdot(samples, samples)) * grid.sample_interval)
    if raw <= 0.0:
        raise InvalidGridError(f"grid does not cover the {what} support")
    return SampledSignal(grid=grid, samples=samples * math.sqrt(target / raw))


def synth_rrc_subpulse(spec: PulseSpec, grid: TimeGrid, energy: float) -> SampledSignal:
    """Truncated root-raised-cosine sub-pulse centered at t = 0.

    Samples sqrt(M*E/T) * profile(M*t/T) on |t| <= T_a/2, zero outside, then
    renormalizes the discrete energy to the requested value.
    """
    if not energy > 0:
        raise InvalidInputError(f"energy must be > 0, got {energy}")
    t = grid.times()
    samples = np.zeros(t.shape, dtype=np.complex128)
    inside = np.abs(t) <= spec.ta / 2.0
    amp = math.sqrt(spec.M * energy / spec.T)
    samples[inside] = amp * _rrc_profile(spec.M * t[inside] / spec.T, spec.beta)
    return _renormalized(grid, samples, energy, "sub-pulse")


def eval_rrc_freq(spec: PulseSpec, f, energy: float = 1.0):
    """Closed-form magnitude spectrum of the untruncated root-raised-cosine pulse.

    Flat at sqrt(T*E/M) up to M(1-beta)/(2T), raised-cosine rolloff to
    M(1+beta)/(2T), zero beyond. Truncation side-lobes are ignored by
    construction. Accepts scalar or array f; returns the same shape.
    """
    f = np.asarray(f, dtype=np.float64)
    af = np.abs(f)
    flat = math.sqrt(spec.T * energy / spec.M)
    f_lo = spec.M * (1.0 - spec.beta) / (2.0 * spec.T)
    f_hi = spec.M * (1.0 + spec.beta) / (2.0 * spec.T)
    out = np.zeros(f.shape, dtype=np.float64)
    out[af <= f_lo] = flat
    if spec.beta > 0.0:
        roll = (af > f_lo) & (af <= f_hi)
        phase = np.pi * spec.T / (spec.beta * spec.M) * (af[roll] - f_lo)
        out[roll] = np.sqrt(spec.T * energy / (2.0 * spec.M) * (1.0 + np.cos(phase)))
    return out if out.ndim else float(out)


def eval_btrrc_freq(spec: PulseSpec, f, energy: float = 1.0):
    """Closed-form magnitude spectrum of the exponential-rolloff sub-pulse.

    Flat at sqrt(T*E/M) up to M(1-beta)/(2T), decaying exponential branch to
    M/(2T) (half power exactly at M/(2T)), complementary branch to
    M(1+beta)/(2T), zero beyond. Falls back to the root-raised-cosine
    spectrum at beta = 0.
    """
    if spec.beta == 0.0:
        return eval_rrc_freq(spec, f, energy)
    f = np.asarray(f, dtype=np.float64)
    af = np.abs(f)
    flat_sq = spec.T * energy / spec.M
    f_lo = spec.M * (1.0 - spec.beta) / (2.0 * spec.T)
    f_mid = spec.M / (2.0 * spec.T)
    f_hi = spec.M * (1.0 + spec.beta) / (2.0 * spec.T)
    rate = 2.0 * math.log(2.0) * spec.T / (spec.beta * spec.M)
    out = np.zeros(f.shape, dtype=np.float64)
    out[af <= f_lo] = math.sqrt(flat_sq)
    lower = (af > f_lo) & (af <= f_mid)
    out[lower] = np.sqrt(flat_sq * np.exp(-rate * (af[lower] - f_lo)))
    upper = (af > f_mid) & (af <= f_hi)
    out[upper] = np.sqrt(flat_sq * (1.0 - np.exp(-rate * (f_hi - af[upper]))))
    return out if out.ndim else float(out)


def _btrrc_profile_at(spec: PulseSpec, tau: np.ndarray, points_per_branch: int = 8192) -> np.ndarray:
    """Time samples of the exponential-rolloff sub-pulse by spectral quadrature.

    The spectrum is real and even, so a(t) = 2 * int_0^{f_hi} A(f) cos(2 pi f t) df.
    Each spectral branch is integrated with its own midpoint rule so the
    branch edges never straddle a quadrature cell.
    """
    edges = [
        0.0,
        spec.M * (1.0 - spec.beta) / (2.0 * spec.T),
        spec.M / (2.0 * spec.T),
        spec.M * (1.0 + spec.beta) / (2.0 * spec.T),
    ]
    total = np.zeros(tau.shape, dtype=np.float64)
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        df = (hi - lo) / points_per_branch
        fq = lo + (np.arange(points_per_branch) + 0.5) * df
        weights = eval_btrrc_freq(spec, fq) * df
        total += 2.0 * np.cos(2.0 * np.pi * np.outer(tau, fq)) @ weights
    return total


def synth_btrrc_subpulse(spec: PulseSpec, grid: TimeGrid, energy: float) -> SampledSignal:
    """Exponential-rolloff sub-pulse centered at t = 0, truncated to [-T_a/2, T_a/2].

    Synthesized by inverse transform of the closed-form spectrum, then
    renormalized to the requested energy. At beta = 0 the spectrum equals the
    root-raised-cosine one, so this delegates to synth_rrc_subpulse.
    """
    if not energy > 0:
        raise InvalidInputError(f"energy must be > 0, got {energy}")
    if spec.beta == 0.0:
        return synth_rrc_subpulse(spec, grid, energy)
    t = grid.times()
    samples = np.zeros(t.shape, dtype=np.complex128)
    inside = np.abs(t) <= spec.ta / 2.0
    samples[inside] = _btrrc_profile_at(spec, t[inside])
    return _renormalized(grid, samples, energy, "sub-pulse")


class _SubpulseEvaluator:
    """Evaluates the chosen sub-pulse profile at offsets, reusing work across
    identical offset patterns (the common aligned-grid case)."""

    def __init__(self, spec: PulseSpec, subpulse: str, sub_energy: float):
        if subpulse not in ("rrc", "btrrc"):
            raise InvalidInputError(f"subpulse must be 'rrc' or 'btrrc', got {subpulse!r}")
        self.spec = spec
        self.subpulse = subpulse
        self.sub_energy = sub_energy
        self._cached_tau: np.ndarray | None = None
        self._cached_val: np.ndarray | None = None

    def __call__(self, tau: np.ndarray) -> np.ndarray:
        if self._cached_tau is not None and np.array_equal(tau, self._cached_tau):
            return self._cached_val
        if self.subpulse == "rrc" or self.spec.beta == 0.0:
            amp = math.sqrt(self.spec.M * self.sub_energy / self.spec.T)
            val = amp * _rrc_profile(self.spec.M * tau / self.spec.T, self.spec.beta)
        else:
            # the spectral quadrature already carries unit energy
            val = math.sqrt(self.sub_energy) * _btrrc_profile_at(self.spec, tau)
        self._cached_tau, self._cached_val = tau, val
        return val


def _assemble_train(
    spec: PulseSpec, grid: TimeGrid, first_center: float, count: int, subpulse: str
) -> SampledSignal:
    """Sum `count` sub-pulses centered at first_center + k*T and renormalize to unit energy."""
    support_end = first_center + (count - 1) * spec.T + spec.ta / 2.0
    support_start = first_center - spec.ta / 2.0
    slack = 1e-9 * max(1.0, abs(support_end))
    if grid.start_time > support_start + slack or grid.end_time < support_end - slack:
        raise InvalidGridError(
            f"grid [{grid.start_time:g}, {grid.end_time:g}] too short for pulse support "
            f"[{support_start:g}, {support_end:g}]"
        )
    t = grid.times()
    out = np.zeros(t.shape, dtype=np.complex128)
    evaluate = _SubpulseEvaluator(spec, subpulse, 1.0 / count)
    half = spec.ta / 2.0
    for k in range(count):
        center = first_center + k * spec.T
        lo, hi = np.searchsorted(t, [center - half, center + half], side="left")
        hi = min(hi + 1, t.shape[0])  # side guard: include a possible boundary hit
        tau = t[lo:hi] - center
        keep = np.abs(tau) <= half
        out[lo:hi][keep] += evaluate(tau[keep])
    return _renormalized(grid, out, 1.0, "pulse train")


def synth_ddop(spec: PulseSpec, grid: TimeGrid, subpulse: str = "rrc") -> SampledSignal:
    """Pulse train of N sub-pulses at spacing T, sub-pulse n centered at n*T + T_a/2.

    Parameters
    ----------
    spec : PulseSpec with family DDOP
    grid : TimeGrid covering [0, (N-1)*T + T_a]
    subpulse : 'rrc' (default) or 'btrrc' for the exponential-rolloff variant

    Returns
    -------
    SampledSignal with unit energy.
    """
    if spec.family is not PulseFamily.DDOP:
        raise InvalidInputError(f"synth_ddop requires family DDOP, got {spec.family.value}")
    return _assemble_train(spec, grid, spec.ta / 2.0, spec.N, subpulse)


def synth_general_ddop(spec: PulseSpec, grid: TimeGrid, subpulse: str = "rrc") -> SampledSignal:
    """Extended train of N + 2D sub-pulses (D prefix, D suffix), unit energy."""
    if spec.family is not PulseFamily.GENERAL_DDOP:
        raise InvalidInputError(
            f"synth_general_ddop requires family GENERAL_DDOP, got {spec.family.value}"
        )
    return _assemble_train(spec, grid, spec.ta / 2.0, spec.N + 2 * spec.D, subpulse)


def synth_tdm(spec: PulseSpec, grid: TimeGrid) -> SampledSignal:
    """Single sub-pulse a(t - T_a/2) with unit energy."""
    t = grid.times()
    samples = np.zeros(t.shape, dtype=np.complex128)
    tau = t - spec.ta / 2.0
    inside = np.abs(tau) <= spec.ta / 2.0
    amp = math.sqrt(spec.M / spec.T)
    samples[inside] = amp * _rrc_profile(spec.M * tau[inside] / spec.T, spec.beta)
    return _renormalized(grid, samples, 1.0, "sub-pulse")


def synth_fdm(spec: PulseSpec, grid: TimeGrid) -> SampledSignal:
    """Unit-energy rectangle (1/sqrt(N*T)) on [0, N*T]."""
    t = grid.times()
    length = spec.N * spec.T
    samples = np.zeros(t.shape, dtype=np.complex128)
    samples[(t >= 0.0) & (t <= length)] = 1.0 / math.sqrt(length)
    return _renormalized(grid, samples, 1.0, "rectangle")


def _dirichlet(spec: PulseSpec, tau: np.ndarray) -> np.ndarray:
    """b(tau) = exp(j(M-1) pi tau/T) sin(M pi tau/T)/sin(pi tau/T); value M at tau = k*T."""
    ratio = tau / spec.T
    near_int = np.abs(ratio - np.round(ratio)) < 1e-9
    out = np.empty(tau.shape, dtype=np.complex128)
    safe = ~near_int
    rs = ratio[safe]
    out[safe] = np.exp(1j * (spec.M - 1) * np.pi * rs) * np.sin(spec.M * np.pi * rs) / np.sin(np.pi * rs)
    out[near_int] = spec.M
    return out


def synth_otfs_basis(spec: PulseSpec, grid: TimeGrid) -> SampledSignal:
    """Multicarrier basis function phi_{m,n} with a rectangular transmit window.

    phi(t) = (1/sqrt(N*M)) * sum_l exp(j*2*pi*n*l/N) * b(t - l*T - m*T/M) * g(t - l*T)
    with g the unit-energy rectangle of duration T and b the Dirichlet kernel
    of order M (limit value M at its singular points). Support is [0, N*T];
    windows are half-open [l*T, (l+1)*T) so they never double-count a sample.
    Renormalized to unit energy.
    """
    if spec.family is not PulseFamily.OTFS_BASIS:
        raise InvalidInputError(
            f"synth_otfs_basis requires family OTFS_BASIS, got {spec.family.value}"
        )
    t = grid.times()
    out = np.zeros(t.shape, dtype=np.complex128)
    g_amp = 1.0 / math.sqrt(spec.T)
    scale = 1.0 / math.sqrt(spec.N * spec.M)
    delay = spec.otfs_m * spec.T / spec.M
    for l in range(spec.N):
        lo, hi = np.searchsorted(t, [l * spec.T, (l + 1) * spec.T], side="left")
        if hi <= lo:
            continue
        window = t[lo:hi]
        phase = np.exp(2j * np.pi * spec.otfs_n * l / spec.N)
        out[lo:hi] += scale * phase * g_amp * _dirichlet(spec, window - l * spec.T - delay)
    return _renormalized(grid, out, 1.0, "basis function")


def eval_ddop_freq(spec: PulseSpec, f, num_tones: int = 40):
    """Closed-form train spectrum: N * exp(-j pi ((N-1)T + T_a) f) * A(f) * sum_m (...).

    The tone sum runs over m in [-num_tones, num_tones] with terms
    exp(j pi (N-1) m) * sinc(N*T*f - m*N). Accepts scalar or array f.
    """
    if num_tones < 0:
        raise InvalidInputError(f"num_tones must be >= 0, got {num_tones}")
    f = np.asarray(f, dtype=np.float64)
    scalar = f.ndim == 0
    f = np.atleast_1d(f)
    m = np.arange(-num_tones, num_tones + 1)
    # (len(f), len(m)) sinc table; exp(j pi (N-1) m) is exactly +-1 by parity.
    args = np.subtract.outer(spec.N * spec.T * f, m * spec.N)
    signs = np.where(((spec.N - 1) * m) % 2 == 0, 1.0, -1.0)
    tone_sum = np.sinc(args) @ signs
    envelope = eval_rrc_freq(spec, f, energy=1.0 / spec.N)
    phase = np.exp(-1j * np.pi * ((spec.N - 1) * spec.T + spec.ta) * f)
    values = spec.N * phase * envelope * tone_sum
    return complex(values[0]) if scalar else values


def synth_pulse(
    spec: PulseSpec,
    grid: TimeGrid | None = None,
    oversample: int = 16,
    subpulse: str = "rrc",
) -> SampledSignal:
    """Synthesize any family on its default grid (or a caller-provided one)."""
    if grid is None:
        grid = pulse_grid(spec, oversample=oversample)
    if spec.family is PulseFamily.RRC_SUBPULSE:
        return synth_rrc_subpulse(spec, grid, 1.0)
    if spec.family is PulseFamily.BTRRC_SUBPULSE:
        return synth_btrrc_subpulse(spec, grid, 1.0)
    if spec.family is PulseFamily.DDOP:
        return synth_ddop(spec, grid, subpulse=subpulse)
    if spec.family is PulseFamily.GENERAL_DDOP:
        return synth_general_ddop(spec, grid, subpulse=subpulse)
    if spec.family is PulseFamily.TDM:
        return synth_tdm(spec, grid)
    if spec.family is PulseFamily.FDM:
        return synth_fdm(spec, grid)
    if spec.family is PulseFamily.OTFS_BASIS:
        return synth_otfs_basis(spec, grid)
    raise InvalidInputError(f"unhandled family {spec.family}")
