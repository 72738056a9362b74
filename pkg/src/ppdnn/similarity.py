"""Structural similarity between consecutive frame thumbnails.

The index is computed on 25x25 grayscale thumbnails with an 11x11 sliding
window; per-patch means, variances and covariance are Gaussian-weighted and
the image score is the mean over all window positions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import THUMBNAIL_SIZE


@dataclass(frozen=True)
class SsimParams:
    window: int = 11
    stride: int = 1
    gaussian_sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0

    def __post_init__(self) -> None:
        if self.window % 2 == 0 or not 1 <= self.window <= THUMBNAIL_SIZE:
            raise ValueError(f"window must be odd and <= {THUMBNAIL_SIZE}, got {self.window}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if self.gaussian_sigma <= 0:
            raise ValueError(f"gaussian_sigma must be positive, got {self.gaussian_sigma}")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("stabilizing constants must be positive")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """2-D Gaussian weights normalized to sum to 1."""
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords**2) / (2.0 * sigma**2))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def ssim(a: np.ndarray, b: np.ndarray, params: SsimParams | None = None) -> float:
    """Mean per-patch structural similarity of two equal-shape grayscale images.

    Patch statistics use Gaussian-weighted moments; covariance is the weighted
    cross-moment minus the product of weighted means.
    """
    params = params or SsimParams()
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.ndim != 2 or min(a.shape) < params.window:
        raise ValueError(f"inputs must be 2-D and at least {params.window} pixels per side")

    kernel = gaussian_window(params.window, params.gaussian_sigma)
    win = params.window
    s = params.stride
    wa = np.lib.stride_tricks.sliding_window_view(a, (win, win))[::s, ::s]
    wb = np.lib.stride_tricks.sliding_window_view(b, (win, win))[::s, ::s]

    mu_a = np.tensordot(wa, kernel, axes=([2, 3], [0, 1]))
    mu_b = np.tensordot(wb, kernel, axes=([2, 3], [0, 1]))
    e_aa = np.tensordot(wa * wa, kernel, axes=([2, 3], [0, 1]))
    e_bb = np.tensordot(wb * wb, kernel, axes=([2, 3], [0, 1]))
    e_ab = np.tensordot(wa * wb, kernel, axes=([2, 3], [0, 1]))

    var_a = e_aa - mu_a**2
    var_b = e_bb - mu_b**2
    cov = e_ab - mu_a * mu_b

    c1, c2 = params.c1, params.c2
    patch = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / (
        (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    )
    return float(patch.mean())


def _lanczos(t: np.ndarray) -> np.ndarray:
    # sinc(t) * sinc(t/3) inside the +-3 support, 0 outside
    out = np.sinc(t) * np.sinc(t / 3.0)
    out[np.abs(t) >= 3.0] = 0.0
    return out


def _resample_weights(in_size: int, out_size: int) -> np.ndarray:
    """(out_size, in_size) Lanczos-3 row weights; rows sum to 1.

    The kernel is widened by the scale factor when minifying; source
    coordinates are clamped at the edges.
    """
    scale = in_size / out_size
    fscale = max(1.0, scale)
    support = 3.0 * fscale
    weights = np.zeros((out_size, in_size))
    for i in range(out_size):
        center = (i + 0.5) * scale - 0.5
        lo = math.floor(center - support)
        hi = math.ceil(center + support)
        taps = np.arange(lo, hi + 1)
        w = _lanczos((taps - center) / fscale)
        src = np.clip(taps, 0, in_size - 1)
        np.add.at(weights[i], src, w)
        weights[i] /= weights[i].sum()
    return weights


def make_thumbnail(image: np.ndarray, size: int = THUMBNAIL_SIZE) -> np.ndarray:
    """Downsample a grayscale image to ``size`` x ``size`` via Lanczos-3.

    Output values are clamped to [0, 255].
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2 or image.size == 0:
        raise ValueError("image must be a non-empty 2-D grayscale array")
    wr = _resample_weights(image.shape[0], size)
    wc = _resample_weights(image.shape[1], size)
    out = wr @ image @ wc.T
    return np.clip(out, 0.0, 255.0)
