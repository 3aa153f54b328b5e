"""Spectral analysis of the origin trace psi(0, t).

Sign convention: the transform kernel is e^{+i omega t}, so a trace
proportional to e^{-i omega0 t} peaks at +omega0, the frequency of the
solitary wave phi(x) e^{-i omega0 t}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

MIN_WINDOW = 64
MIN_SPLIT = 256
HANN_POWER_GAIN = 3.0 / 8.0  # mean of w^2 for the periodic Hann taper


@dataclass(frozen=True)
class Spectrum:
    frequencies: np.ndarray
    magnitudes: np.ndarray
    t_start: float
    t_end: float
    taper: str = "hann"

    @property
    def spacing(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])


def hann(n: int) -> np.ndarray:
    """Periodic Hann taper 0.5 (1 - cos(2 pi j / n))."""
    return 0.5 * (1.0 - np.cos(2 * np.pi * np.arange(n) / n))


def _select(trace, h, t_start, t_end, t0):
    y = np.asarray(trace, dtype=np.complex128)
    t = t0 + h * np.arange(len(y))
    eps = 1e-9 * h
    sel = (t >= t_start - eps) & (t < t_end - eps)
    return y[sel], t[sel]


def windowed_spectrum(trace, h: float, window: tuple[float, float], t0: float = 0.0, pad: int = 1) -> Spectrum:
    """Hann-tapered transform of the samples with t_start <= t < t_end.

    magnitudes[k] = h |sum_n w_n y_n e^{i omega_k t_n}|, frequencies ascending
    with spacing 2 pi / (N h) (divided by ``pad`` when zero padding).
    """
    t_start, t_end = window
    y, t = _select(trace, h, t_start, t_end, t0)
    n = len(y)
    if n < MIN_WINDOW:
        raise ValueError(f"window holds {n} samples; at least {MIN_WINDOW} required")
    yw = y * hann(n)
    size = n * int(pad)
    # numpy's inverse transform carries the e^{+i omega t} kernel
    X = size * np.fft.ifft(yw, size)
    omega = 2 * np.pi * np.fft.fftfreq(size, h)
    order = np.argsort(omega, kind="stable")
    return Spectrum(omega[order], h * np.abs(X[order]), float(t[0]), float(t[0] + n * h))


def band_mass_fraction(sp: Spectrum, band: tuple[float, float]) -> float:
    lo, hi = band
    if not lo < hi:
        raise ValueError("band must satisfy lo < hi")
    p = sp.magnitudes**2
    total = p.sum()
    if total == 0:
        return 0.0
    inside = (sp.frequencies >= lo) & (sp.frequencies <= hi)
    return float(p[inside].sum() / total)


def edge_taper(n: int, edge_fraction: float = 0.15) -> np.ndarray:
    """1 in the interior, erf roll-off to ~0 over the first/last edge_fraction of samples."""
    e = edge_fraction * n
    s = e / 16.0
    j = np.arange(n)
    up = 0.5 * (1 + erf((j - e / 2) / (s * math.sqrt(2))))
    down = 0.5 * (1 + erf(((n - 1 - j) - e / 2) / (s * math.sqrt(2))))
    return up * down


def bound_dispersive_split(trace, h: float, m: float, margin: float | None = None, edge_fraction: float = 0.15):
    """Split a trace into bound (|omega| <= m + margin) and dispersive parts.

    The trace is rolled off smoothly over the first and last ``edge_fraction``
    of its length and then projected with a sharp frequency mask; the
    dispersive part is the exact complement, so bound + dispersive equals
    the input. Away from the two edge zones the projection is free of
    leakage from the finite window.
    """
    y = np.asarray(trace, dtype=np.complex128)
    if len(y) < MIN_SPLIT:
        raise ValueError(f"trace holds {len(y)} samples; at least {MIN_SPLIT} required")
    if margin is None:
        margin = 0.05 * m
    omega = 2 * np.pi * np.fft.fftfreq(len(y), h)
    mask = np.abs(omega) <= m + margin
    bound = np.fft.ifft(np.fft.fft(y * edge_taper(len(y), edge_fraction)) * mask)
    return bound, y - bound


def spectral_concentration(sp: Spectrum) -> tuple[float, float]:
    """Dominant frequency and spectral width of a spectrum.

    The dominant frequency is the peak bin refined by a parabola through the
    log-magnitudes of the peak and its two neighbours; the width is the
    root of the magnitude^2-weighted second moment about it.
    """
    p = sp.magnitudes**2
    if not np.any(p > 0):
        raise ValueError("spectrum is identically zero")
    k = int(np.argmax(p))
    w0 = float(sp.frequencies[k])
    if 0 < k < len(p) - 1 and np.all(sp.magnitudes[k - 1 : k + 2] > 0):
        a, b, c = np.log(sp.magnitudes[k - 1 : k + 2])
        den = a - 2 * b + c
        if den < 0:
            w0 += 0.5 * (a - c) / den * sp.spacing
    width = math.sqrt(float(np.sum(p * (sp.frequencies - w0) ** 2) / p.sum()))
    return w0, width


def trace_concentration(trace, h: float, window: tuple[float, float], t0: float = 0.0) -> tuple[float, float]:
    return spectral_concentration(windowed_spectrum(trace, h, window, t0))
