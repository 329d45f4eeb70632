"""Spectral synthesis of complex-valued fractional Brownian motion fields.

A CV-fBm field is built by shaping complex white noise in the Fourier domain
with an isotropic power-law envelope controlled by the Hurst parameter H.
Larger H means a steeper spectrum and a smoother field.
"""

from __future__ import annotations

import numpy as np

from .grid import as_field, dft2, idft2, take_quadrant

__all__ = [
    "spectral_envelope",
    "synthesize_cvfbm",
    "normalize_dynamic_range",
]


def _check_hurst(h: float) -> float:
    h = float(h)
    if not 0.0 < h < 1.0:
        raise ValueError(f"hurst parameter must lie in (0, 1), got {h}")
    return h


def radial_frequency(rows: int, cols: int) -> np.ndarray:
    """|omega| on the grid, using signed integer frequencies per axis.

    Bin k maps to k for k <= N/2 and k - N above, i.e. the standard centered
    convention in FFT layout.
    """
    wr = np.fft.fftfreq(rows, d=1.0 / rows)
    wc = np.fft.fftfreq(cols, d=1.0 / cols)
    return np.sqrt(wr[:, None] ** 2 + wc[None, :] ** 2)


def spectral_envelope(h: float, rows: int, cols: int, kind: str = "amplitude") -> np.ndarray:
    """Power-law gain grid |omega|^-(2H+1), zero at DC.

    kind="amplitude" applies the exponent to coefficient magnitudes directly;
    kind="power" treats the law as a power spectrum, so magnitudes get the
    square root, exponent (2H+1)/2.
    """
    h = _check_hurst(h)
    if rows < 2 or cols < 2:
        raise ValueError("envelope needs at least a 2x2 grid")
    if kind not in ("amplitude", "power"):
        raise ValueError(f"unknown envelope kind {kind!r}")
    expo = 2.0 * h + 1.0
    if kind == "power":
        expo /= 2.0
    w = radial_frequency(rows, cols)
    gains = np.zeros((rows, cols))
    nz = w > 0
    gains[nz] = w[nz] ** (-expo)
    return gains


def synthesize_cvfbm(
    h: float,
    rows: int,
    cols: int,
    seed,
    envelope: str = "amplitude",
    periodic: bool = True,
) -> np.ndarray:
    """Draw a deterministic CV-fBm field of shape (rows, cols).

    Circular complex Gaussian white noise (unit variance per sample) is
    transformed, multiplied by :func:`spectral_envelope`, and transformed
    back.

    With ``periodic=True`` (default) the noise is drawn directly on the target
    grid; the result is exactly periodic and has exactly zero mean (the DC
    gain is zero).

    With ``periodic=False`` the noise is drawn on a doubled 2*rows x 2*cols
    grid and the top-left quadrant is returned. The quadrant is a free patch
    of a larger field: it is not periodic and keeps whatever nonzero mean the
    crop produces. Use this when downstream processing supplies its own
    boundary handling (e.g. mirror extension).
    """
    h = _check_hurst(h)
    if rows < 2 or cols < 2:
        raise ValueError("field needs at least a 2x2 grid")
    rng = np.random.default_rng(seed)
    if periodic:
        m, n = rows, cols
    else:
        m, n = 2 * rows, 2 * cols
    noise = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2.0)
    shaped = idft2(dft2(noise) * spectral_envelope(h, m, n, kind=envelope))
    if periodic:
        return shaped
    return take_quadrant(shaped)


def normalize_dynamic_range(field, target_rms: float) -> np.ndarray:
    """Rescale so the RMS of the complex magnitudes equals target_rms."""
    f = as_field(field)
    if target_rms <= 0:
        raise ValueError("target_rms must be positive")
    rms = np.sqrt(np.mean(np.abs(f) ** 2))
    if rms == 0:
        raise ValueError("cannot normalize an identically zero field")
    return f * (target_rms / rms)
