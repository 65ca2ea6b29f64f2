"""Frequency-domain machinery: direct transforms, peak tracking, and the
per-mode decomposition of a training gradient.

All transforms are exact direct summations (O(N^2) / O(nK)); at the sample
sizes used here that is cheap and keeps every value independently checkable
against a second summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .nn import Mlp, backprop, forward, grad_to_vector

__all__ = [
    "Spectrum",
    "FreqTrace",
    "TraceRow",
    "GradDecomposition",
    "dft_uniform",
    "nufft_direct",
    "pick_peaks",
    "rel_freq_diff",
    "step_to_threshold",
    "grad_decomposition",
]

#: denominator amplitudes below this yield an infinite relative difference
_DENOM_FLOOR = 1e-14


@dataclass
class Spectrum:
    """Complex Fourier coefficients indexed by integer frequency.

    Convention: coefficients[gamma] = sum_j values_j * exp(-2*pi*i * x_j * gamma)
    with nodes x_j in [0, 1]; uniform sampling uses x_j = j/N.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if self.coefficients.ndim != 1 or len(self.coefficients) < 1:
            raise ValueError("spectrum needs a nonempty 1-d coefficient vector")
        if not np.all(np.isfinite(self.coefficients)):
            raise ValueError("spectrum coefficients must be finite")

    def __len__(self) -> int:
        return len(self.coefficients)

    def amplitudes(self) -> np.ndarray:
        return np.abs(self.coefficients)


def dft_uniform(values) -> Spectrum:
    """Unnormalized forward DFT of uniformly sampled values (direct summation)."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("dft_uniform needs a nonempty 1-d vector")
    n = v.size
    j = np.arange(n)
    phase = np.exp((-2j * math.pi / n) * np.outer(j, j))
    return Spectrum(phase @ v)


def nufft_direct(points, values, num_freqs: int) -> Spectrum:
    """Direct-sum transform of values at nonuniform nodes in [0, 1].

    coefficients[k] = sum_j values_j * exp(-2*pi*i * points_j * k) for
    k = 0..num_freqs-1. Exact summation, no gridding approximation.
    """
    x = np.asarray(points, dtype=float)
    v = np.asarray(values, dtype=float)
    if x.shape != v.shape or x.ndim != 1:
        raise ValueError("points and values must be matching 1-d vectors")
    if num_freqs < 1:
        raise ValueError("num_freqs must be >= 1")
    if np.any(x < -1e-9) or np.any(x > 1.0 + 1e-9):
        raise ValueError("nodes must lie in [0, 1]")
    k = np.arange(num_freqs)
    phase = np.exp(-2j * math.pi * np.outer(k, x))
    return Spectrum(phase @ v)


def pick_peaks(spectrum: Spectrum, max_count: int = 4, min_rel_amplitude: float = 0.05) -> list[int]:
    """Dominant local maxima of the amplitude over the first half-spectrum.

    Candidates are local maxima of |coefficients| on 0..len//2 (the window
    boundaries compare against their single inside neighbor), filtered to at
    least min_rel_amplitude of the window maximum; the max_count largest
    survive, returned in ascending frequency order.
    """
    amps = spectrum.amplitudes()
    half = len(amps) // 2
    window = amps[: half + 1]
    top = float(window.max())
    candidates = []
    for g in range(half + 1):
        left_ok = g == 0 or window[g] > window[g - 1]
        right_ok = g == half or window[g] > window[g + 1]
        if left_ok and right_ok and window[g] >= min_rel_amplitude * top:
            candidates.append(g)
    candidates.sort(key=lambda g: window[g], reverse=True)
    return sorted(candidates[:max_count])


def rel_freq_diff(
    model_spec: Spectrum,
    target_spec: Spectrum,
    freq_index: int,
    denominator: str = "target",
) -> float:
    """|model - target| at one frequency, normalized by the chosen spectrum.

    Returns +inf when the denominator amplitude is below 1e-14.
    """
    if denominator not in ("target", "model"):
        raise ValueError(f"denominator must be 'target' or 'model', got {denominator!r}")
    if not 0 <= freq_index < min(len(model_spec), len(target_spec)):
        raise IndexError(f"frequency index {freq_index} out of range")
    num = abs(model_spec.coefficients[freq_index] - target_spec.coefficients[freq_index])
    den_spec = target_spec if denominator == "target" else model_spec
    den = abs(den_spec.coefficients[freq_index])
    if den < _DENOM_FLOOR:
        return math.inf
    return float(num / den)


@dataclass
class TraceRow:
    recording_step: int
    epoch: int
    wall_ms: float
    loss: float
    df: dict[int, float]


@dataclass
class FreqTrace:
    """Per-recording-step history of the relative frequency differences."""

    selected_peaks: tuple[int, ...]
    rows: list[TraceRow] = field(default_factory=list)

    def append(self, recording_step: int, epoch: int, wall_ms: float, loss: float, df: dict[int, float]):
        if self.rows and recording_step <= self.rows[-1].recording_step:
            raise ValueError("recording_step must be strictly increasing")
        missing = set(self.selected_peaks) - set(df)
        if missing:
            raise ValueError(f"missing frequency entries {sorted(missing)}")
        self.rows.append(TraceRow(recording_step, epoch, wall_ms, loss, dict(df)))

    def header(self) -> list[str]:
        return ["step", "epoch", "wall_ms", "loss"] + [f"df_{g}" for g in self.selected_peaks]

    def table(self) -> list[list]:
        return [
            [r.recording_step, r.epoch, r.wall_ms, r.loss] + [r.df[g] for g in self.selected_peaks]
            for r in self.rows
        ]


def step_to_threshold(trace: FreqTrace, freq_index: int, threshold: float) -> int | None:
    """First recording step with the relative difference at or below threshold."""
    if freq_index not in trace.selected_peaks:
        raise KeyError(f"frequency index {freq_index} is not tracked by this trace")
    for row in trace.rows:
        if row.df[freq_index] <= threshold:
            return row.recording_step
    return None


@dataclass
class GradDecomposition:
    """Per-mode split of a training gradient over the unitary Fourier basis.

    All parameter-indexed arrays are flattened to a single vector in the
    network's canonical parameter order. mode_terms[k] summed over k must
    reproduce direct_grad (real part) with a vanishing imaginary remainder.
    """

    d_k: np.ndarray            # (K,) complex: coefficients of dl/doutput
    dc_dtheta: np.ndarray      # (K, P) complex: mode-coefficient gradients
    mode_terms: np.ndarray     # (K, P) complex: per-mode gradient contributions
    direct_grad: np.ndarray    # (P,) float: gradient computed without the split

    def summed(self) -> np.ndarray:
        return self.mode_terms.sum(axis=0)

    @property
    def real_residual(self) -> float:
        scale = np.linalg.norm(self.direct_grad)
        return float(np.linalg.norm(self.summed().real - self.direct_grad) / scale)

    @property
    def imag_residual(self) -> float:
        scale = np.linalg.norm(self.direct_grad)
        return float(np.linalg.norm(self.summed().imag) / scale)

    def mode_magnitudes(self) -> np.ndarray:
        return np.linalg.norm(self.mode_terms, axis=1)


def _check_uniform(xs: np.ndarray) -> None:
    if len(xs) < 2:
        return
    diffs = np.diff(xs)
    span = abs(xs[-1] - xs[0]) + 1e-30
    if np.max(np.abs(diffs - diffs[0])) > 1e-9 * span:
        raise ValueError("samples must be uniformly spaced for the mode decomposition")


def grad_decomposition(
    mlp: Mlp,
    xs: np.ndarray,
    pointwise_loss: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    output_dim: int = 0,
) -> GradDecomposition:
    """Split the loss gradient through one output dimension into Fourier modes.

    pointwise_loss maps the (N, out) network outputs to per-sample loss values
    (N,) and per-sample derivatives (N, out); the loss must act sample by
    sample (couplings across samples break the identity). The expansion uses
    the orthonormal basis p_k(j) = exp(2*pi*i*k*j/N)/sqrt(N) over the sample
    index, which requires uniformly spaced scalar samples.
    """
    xs = np.asarray(xs, dtype=float)
    flat = xs.reshape(len(xs), -1)
    if flat.shape[1] != 1:
        raise ValueError("mode decomposition expects scalar inputs")
    _check_uniform(flat[:, 0])
    n = len(xs)
    outputs, cache = forward(mlp, flat)
    if not 0 <= output_dim < outputs.shape[1]:
        raise IndexError(f"output_dim {output_dim} out of range")
    _, dl_dout = pointwise_loss(outputs)
    if dl_dout.shape != outputs.shape:
        raise ValueError("pointwise_loss must return per-sample derivatives matching the outputs")
    s = dl_dout[:, output_dim]

    # per-sample parameter gradients of the selected output dimension
    rows = []
    for j in range(n):
        seed = np.zeros_like(outputs)
        seed[j, output_dim] = 1.0
        rows.append(grad_to_vector(backprop(mlp, cache, seed)))
    jac = np.stack(rows)  # (N, P)

    k = np.arange(n)
    basis = np.exp((2j * math.pi / n) * np.outer(k, k)) / math.sqrt(n)  # basis[k, j]
    d_k = basis @ s
    dc_dtheta = np.conjugate(basis) @ jac
    mode_terms = dc_dtheta * d_k[:, None]
    direct = s @ jac
    return GradDecomposition(d_k=d_k, dc_dtheta=dc_dtheta, mode_terms=mode_terms, direct_grad=direct)
