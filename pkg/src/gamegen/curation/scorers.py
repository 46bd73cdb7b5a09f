"""Deterministic pixel-statistic scorers.

These stand in for learned operators behind a common interface: each
scorer has a name, a declared closed range, and a pure score(pixels)
function, so a real model can be substituted per score without touching
the pipeline. The manifest records which scorer produced each value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .video import HIST_BINS, luma


@runtime_checkable
class ScorerInterface(Protocol):
    name: str
    low: float
    high: float

    def score(self, pixels: np.ndarray) -> float: ...


@dataclass(frozen=True)
class GameStyleScorer:
    """Colorfulness proxy for the game/anime style gate: mean per-pixel
    saturation (max-min channel spread over max)."""

    name: str = "style"
    low: float = 0.0
    high: float = 1.0

    def score(self, pixels: np.ndarray) -> float:
        rgb = pixels[:, :, :3].astype(np.float64)
        mx = rgb.max(axis=2)
        mn = rgb.min(axis=2)
        sat = np.divide(mx - mn, mx, out=np.zeros_like(mx), where=mx > 0)
        return float(np.clip(sat.mean(), self.low, self.high))


@dataclass(frozen=True)
class ClarityScorer:
    """Sharpness proxy: mean absolute 4-neighbor Laplacian of luma,
    normalized by full scale."""

    name: str = "clarity"
    low: float = 0.0
    high: float = 1.0

    def score(self, pixels: np.ndarray) -> float:
        g = luma(pixels)
        if g.shape[0] < 3 or g.shape[1] < 3:
            return 0.0
        lap = (
            4.0 * g[1:-1, 1:-1]
            - g[:-2, 1:-1]
            - g[2:, 1:-1]
            - g[1:-1, :-2]
            - g[1:-1, 2:]
        )
        return float(np.clip(np.abs(lap).mean() / 255.0, self.low, self.high))


@dataclass(frozen=True)
class HistogramEntropyScorer:
    """Aesthetic stand-in: luma histogram entropy over 32 bins, scaled to
    [0, 1] by the 5-bit maximum."""

    name: str = "aesthetic"
    low: float = 0.0
    high: float = 1.0

    def score(self, pixels: np.ndarray) -> float:
        g = (luma(pixels) // (256 // HIST_BINS)).astype(np.int64)
        counts = np.bincount(g.reshape(-1), minlength=HIST_BINS)
        p = counts[counts > 0] / counts.sum()
        entropy = float(-(p * np.log2(p)).sum())
        return float(np.clip(entropy / np.log2(HIST_BINS), self.low, self.high))


def default_image_scorers() -> tuple:
    return (GameStyleScorer(), ClarityScorer(), HistogramEntropyScorer())
