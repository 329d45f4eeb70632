"""Baseline interpolators: boxcar window averaging and thin-plate splines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import SampleSet

__all__ = [
    "BoxcarConfig",
    "boxcar_reconstruct",
    "ThinPlateConfig",
    "thin_plate_reconstruct",
    "thin_plate_coefficients",
    "default_smoothing_p",
]


@dataclass(frozen=True)
class BoxcarConfig:
    window: int = 11
    range_adjust: str = "affine"

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError("window must be an odd positive integer")
        if self.range_adjust not in ("none", "affine"):
            raise ValueError(f"unknown range_adjust {self.range_adjust!r}")


def _box_sums(img: np.ndarray, w: int) -> np.ndarray:
    """Sum of img over the w x w window centered at each cell, border-clipped."""
    r = (w - 1) // 2
    padded = np.pad(img, ((r + 1, r), (r + 1, r)))
    c = np.cumsum(np.cumsum(padded, axis=0), axis=1)
    return c[w:, w:] - c[:-w, w:] - c[w:, :-w] + c[:-w, :-w]


def boxcar_reconstruct(samples: SampleSet, cfg: BoxcarConfig = BoxcarConfig()) -> np.ndarray:
    """Average the known values inside a window centered on each grid cell.

    Window membership uses Chebyshev distance <= (window-1)/2, clipped at the
    grid borders. Cells whose window holds no samples get the window grown by
    2 until it does. With range_adjust="affine" a complex least-squares map
    a*z + b is fitted from the raw predictions at the sample positions to the
    known values and applied to the whole field.
    """
    if len(samples) == 0:
        raise ValueError("boxcar needs at least one sample")
    shape = (samples.rows, samples.cols)
    count_img = np.zeros(shape)
    value_img = np.zeros(shape, dtype=np.complex128)
    r, c = samples.positions[:, 0], samples.positions[:, 1]
    count_img[r, c] = 1.0
    value_img[r, c] = samples.values

    w = cfg.window
    counts = _box_sums(count_img, w)
    totals = _box_sums(value_img, w)
    out = np.where(counts > 0.5, totals / np.maximum(counts, 1.0), 0.0 + 0.0j)
    empty = counts < 0.5
    while empty.any():
        w += 2
        counts = _box_sums(count_img, w)
        totals = _box_sums(value_img, w)
        fill = empty & (counts > 0.5)
        out[fill] = (totals / np.maximum(counts, 1.0))[fill]
        empty &= counts < 0.5

    if cfg.range_adjust == "affine":
        pred = out[r, c]
        design = np.stack([pred, np.ones_like(pred)], axis=1)
        coef, *_ = np.linalg.lstsq(design, samples.values, rcond=None)
        out = coef[0] * out + coef[1]
    return out


@dataclass(frozen=True)
class ThinPlateConfig:
    # p = 1 interpolates; smaller p trades fit error for surface smoothness.
    # None picks 1 / (1 + h^3/6) from the mean nearest-neighbor spacing h.
    p: float | None = None
    epsilon: float = 0.0

    def __post_init__(self):
        if self.p is not None and not 0.0 < self.p <= 1.0:
            raise ValueError("p must lie in (0, 1]")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")


def default_smoothing_p(positions: np.ndarray) -> float:
    """Heuristic p = 1/(1 + h^3/6), h = mean nearest-neighbor spacing."""
    pts = np.asarray(positions, dtype=float)
    if len(pts) < 2:
        return 1.0
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    np.fill_diagonal(d2, np.inf)
    h = float(np.mean(np.sqrt(d2.min(axis=1))))
    return 1.0 / (1.0 + h**3 / 6.0)


def _phi(d2: np.ndarray) -> np.ndarray:
    """Thin-plate kernel r^2 log r expressed on squared distances, phi(0)=0."""
    out = np.zeros_like(d2)
    nz = d2 > 0
    out[nz] = 0.5 * d2[nz] * np.log(d2[nz])
    return out


def thin_plate_coefficients(samples: SampleSet, cfg: ThinPlateConfig = ThinPlateConfig()):
    """Solve the smoothing-spline system; returns (c, d, p).

    The surface is f(x) = sum_j c_j phi(|x - x_j|) + d0 + d1*row + d2*col
    with [[K + rho*I, P], [P^T, 0]] [c; d] = [values; 0] and rho = (1-p)/p.
    One complex solve covers both value channels (the matrix is real). The
    side conditions sum(c) = 0, sum(c*row) = 0, sum(c*col) = 0 are rows of
    the system itself.
    """
    n = len(samples)
    if n < 3:
        raise ValueError("thin-plate fit needs at least 3 samples")
    pts = samples.positions.astype(float)
    # collinearity check via the rank of the polynomial block
    pblock = np.concatenate([np.ones((n, 1)), pts], axis=1)
    if np.linalg.matrix_rank(pblock) < 3:
        raise ValueError("sample positions are collinear")
    p = cfg.p if cfg.p is not None else default_smoothing_p(pts)
    rho = (1.0 - p) / p
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    system = np.zeros((n + 3, n + 3))
    system[:n, :n] = _phi(d2) + (rho + cfg.epsilon) * np.eye(n)
    system[:n, n:] = pblock
    system[n:, :n] = pblock.T
    rhs = np.concatenate([samples.values, np.zeros(3, dtype=np.complex128)])
    sol = np.linalg.solve(system, rhs)
    return sol[:n], sol[n:], p


def thin_plate_reconstruct(samples: SampleSet, cfg: ThinPlateConfig = ThinPlateConfig()) -> np.ndarray:
    """Evaluate the fitted smoothing spline on the full grid."""
    c, d, _ = thin_plate_coefficients(samples, cfg)
    pts = samples.positions.astype(float)
    rows, cols = samples.rows, samples.cols
    gr, gc = np.mgrid[0:rows, 0:cols]
    grid = np.stack([gr.ravel(), gc.ravel()], axis=1).astype(float)
    # evaluate in row blocks to keep the distance matrix modest
    out = np.empty(rows * cols, dtype=np.complex128)
    step = max(1, 2_000_000 // max(len(pts), 1))
    for start in range(0, len(grid), step):
        block = grid[start : start + step]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
        out[start : start + step] = _phi(d2) @ c + d[0] + block @ d[1:]
    return out.reshape(rows, cols)
