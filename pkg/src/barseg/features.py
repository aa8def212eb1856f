"""Non-deep baseline representation: log-mel spectrograms and Barwise TF.

The Barwise TF matrix flattens each bar's time-frequency patch into one
vector per bar: the spectrogram rows overlapping a bar are resampled to a
fixed number of frames and concatenated, so every bar yields a vector of
identical size regardless of tempo.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

from .core import BarGrid, BarMatrix
from .errors import InvalidInput, UnsupportedFormat

DEFAULT_N_FFT = 2048
DEFAULT_HOP = 512
DEFAULT_N_MELS = 80
DEFAULT_FRAMES_PER_BAR = 96


@dataclass(frozen=True)
class Spectrogram:
    """T x F time-frequency matrix with its frame timing."""

    frames: np.ndarray
    hop: float
    sample_rate: float

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
            raise InvalidInput("spectrogram must be a non-empty T x F matrix")
        if not np.all(np.isfinite(frames)):
            raise InvalidInput("spectrogram entries must be finite")
        if self.hop <= 0:
            raise InvalidInput("hop must be positive")
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def frame_times(self) -> np.ndarray:
        return np.arange(self.frames.shape[0]) * self.hop


def decode_audio(path) -> tuple[np.ndarray, int]:
    """Decode a PCM WAV file to a mono float array in [-1, 1].

    Supports 16/24/32-bit integer and 32-bit float samples with one or two
    channels; stereo is downmixed by averaging.
    """
    try:
        sample_rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except (ValueError, OSError) as exc:
        raise UnsupportedFormat(f"{path}: {exc}") from exc

    if data.ndim == 1:
        channels = 1
    elif data.ndim == 2:
        channels = data.shape[1]
    else:
        raise UnsupportedFormat(f"{path}: unexpected sample layout {data.shape}")
    if channels > 2:
        raise UnsupportedFormat(f"{path}: {channels} channels, only mono/stereo supported")

    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:  # 24-bit PCM also arrives as left-justified int32
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedFormat(
            f"{path}: unsupported sample format {data.dtype}; "
            "need 16/24/32-bit int or 32-bit float PCM"
        )

    if channels == 2:
        samples = samples.mean(axis=1)
    return np.clip(samples, -1.0, 1.0), int(sample_rate)


def _hz_to_mel(freq):
    return 2595.0 * np.log10(1.0 + np.asarray(freq, dtype=np.float64) / 700.0)


def _mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(sample_rate: float, n_fft: int, n_mels: int) -> np.ndarray:
    """HTK-style triangular filterbank (peak 1) from 0 Hz to Nyquist."""
    fft_freqs = np.linspace(0.0, sample_rate / 2.0, n_fft // 2 + 1)
    mel_points = np.linspace(0.0, _hz_to_mel(sample_rate / 2.0), n_mels + 2)
    hz_points = _mel_to_hz(mel_points)

    bank = np.zeros((n_mels, len(fft_freqs)))
    for m in range(n_mels):
        left, center, right = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        rising = (fft_freqs - left) / (center - left)
        falling = (right - fft_freqs) / (right - center)
        bank[m] = np.clip(np.minimum(rising, falling), 0.0, None)
    return bank


def mel_band_centers(sample_rate: float, n_mels: int) -> np.ndarray:
    """Center frequency (Hz) of each mel band."""
    mel_points = np.linspace(0.0, _hz_to_mel(sample_rate / 2.0), n_mels + 2)
    return _mel_to_hz(mel_points[1:-1])


def log_mel(
    samples,
    sample_rate: float,
    n_fft: int = DEFAULT_N_FFT,
    hop: int = DEFAULT_HOP,
    n_mels: int = DEFAULT_N_MELS,
) -> Spectrogram:
    """Magnitude STFT -> mel filterbank -> log(1 + x).

    Frame t is centered at t * hop samples; the signal is reflect-padded by
    n_fft / 2 so the first and last frames are defined.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1:
        raise InvalidInput("samples must be a mono 1-D sequence")
    if len(samples) < n_fft:
        raise InvalidInput(
            f"signal too short: {len(samples)} samples, need at least {n_fft}"
        )

    pad = n_fft // 2
    padded = np.pad(samples, pad, mode="reflect")
    n_frames = 1 + len(samples) // hop
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n_fft) / n_fft)

    frames = np.lib.stride_tricks.as_strided(
        padded,
        shape=(n_frames, n_fft),
        strides=(padded.strides[0] * hop, padded.strides[0]),
    )
    magnitude = np.abs(np.fft.rfft(frames * window, axis=1))

    bank = mel_filterbank(sample_rate, n_fft, n_mels)
    mel = magnitude @ bank.T
    return Spectrogram(np.log1p(mel), hop=hop / sample_rate, sample_rate=sample_rate)


def barwise_tf(
    spec: Spectrogram, grid: BarGrid, frames_per_bar: int = DEFAULT_FRAMES_PER_BAR
) -> BarMatrix:
    """Flatten each bar's time-frequency patch into one fixed-size vector.

    The frames whose centers fall inside a bar are resampled along time to
    exactly ``frames_per_bar`` rows by linear interpolation, then flattened
    row-major. A bar too short to contain any frame center replicates its
    nearest frame.
    """
    times = spec.frame_times
    extent = spec.frames.shape[0] * spec.hop
    if grid.bar_starts[-1] > extent + spec.hop + 1e-9:
        raise InvalidInput(
            f"bar grid (ends {grid.bar_starts[-1]:.3f}s) extends beyond "
            f"spectrogram extent ({extent:.3f}s)"
        )

    n_bars = grid.num_bars
    n_bins = spec.frames.shape[1]
    out = np.empty((n_bars, frames_per_bar * n_bins))
    for b in range(n_bars):
        start, end = grid.bar_interval(b)
        idx = np.nonzero((times >= start) & (times < end))[0]
        if len(idx) == 0:
            center = 0.5 * (start + end)
            idx = np.array([int(np.argmin(np.abs(times - center)))])
        rows = spec.frames[idx]
        out[b] = _resample_rows(rows, frames_per_bar).reshape(-1)
    return BarMatrix(out, feature_id="barwise_tf")


def _resample_rows(rows: np.ndarray, target: int) -> np.ndarray:
    n = rows.shape[0]
    if n == 1:
        return np.repeat(rows, target, axis=0)
    pos = np.linspace(0.0, n - 1.0, target)
    lo = np.floor(pos).astype(np.intp)
    hi = np.minimum(lo + 1, n - 1)
    frac = (pos - lo)[:, None]
    return rows[lo] * (1.0 - frac) + rows[hi] * frac


def pool_barwise(frame_features, frame_times, grid: BarGrid) -> BarMatrix:
    """Average frame-level features into one vector per bar.

    Row i is the arithmetic mean of the frames whose time falls in
    [bar_starts[i], bar_starts[i+1]); a bar containing no frame copies its
    nearest frame instead.
    """
    feats = np.asarray(frame_features, dtype=np.float64)
    times = np.asarray(frame_times, dtype=np.float64)
    if feats.ndim != 2 or feats.shape[0] == 0:
        raise InvalidInput("frame features must be a non-empty T x D matrix")
    if times.ndim != 1 or len(times) != feats.shape[0]:
        raise InvalidInput("frame_times length must match the frame count")
    if np.any(np.diff(times) < 0):
        raise InvalidInput("frame_times must be non-decreasing")

    out = np.empty((grid.num_bars, feats.shape[1]))
    for b in range(grid.num_bars):
        start, end = grid.bar_interval(b)
        mask = (times >= start) & (times < end)
        if mask.any():
            out[b] = feats[mask].mean(axis=0)
        else:
            center = 0.5 * (start + end)
            out[b] = feats[int(np.argmin(np.abs(times - center)))]
    return BarMatrix(out, feature_id="pooled")
