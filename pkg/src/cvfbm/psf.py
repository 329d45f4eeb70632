"""Star-image ellipticity: shear transform, rendering, quadrature moments.

The complex ellipticity e = e1 + i*e2 describes how a circular profile is
stretched. Rendering applies the shear to pixel coordinates; measurement
inverts it through flux-weighted second moments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import j1

__all__ = [
    "shear_coords",
    "RadialProfile",
    "render_star",
    "brightness_moments",
    "MomentTensor",
    "ellipticity_from_moments",
    "psf_radius",
]


def shear_coords(e1: float, e2: float, x0, y0):
    """Apply the ellipticity shear to coordinates (x0, y0).

    Returns (xp, yp) = ((1-e1)x0 - e2*y0, -e2*x0 + (1+e1)y0). Points on the
    distorted profile map back onto the circular one.
    """
    xp = (1.0 - e1) * np.asarray(x0) - e2 * np.asarray(y0)
    yp = -e2 * np.asarray(x0) + (1.0 + e1) * np.asarray(y0)
    return xp, yp


@dataclass(frozen=True)
class RadialProfile:
    """Circular brightness profile evaluated on the normalized radius u = r/scale.

    kinds: "gaussian" exp(-u^2/2); "moffat" (1+u^2)^-beta; "airy"
    [2 J1(u)/u]^2 with the limit 1 at u = 0.
    """

    kind: str = "gaussian"
    scale: float = 3.0
    beta: float = 3.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "moffat", "airy"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.kind == "moffat" and self.beta <= 1:
            raise ValueError("moffat beta must exceed 1")

    def value(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-0.5 * u**2)
        if self.kind == "moffat":
            return (1.0 + u**2) ** (-self.beta)
        out = np.ones_like(u)
        nz = u > 0
        out[nz] = (2.0 * j1(u[nz]) / u[nz]) ** 2
        return out


def render_star(profile: RadialProfile, e1: float, e2: float, size: int, flux: float = 1.0) -> np.ndarray:
    """Render a sheared star on an odd-sized grid, normalized to total flux.

    Pixel (row, col) is evaluated at its center; the image x axis is the
    column offset from center, y the row offset.
    """
    if size % 2 == 0:
        raise ValueError("star image size must be odd")
    if np.hypot(e1, e2) >= 1.0:
        raise ValueError("|e| must be below 1")
    if flux <= 0:
        raise ValueError("flux must be positive")
    c = (size - 1) / 2.0
    rows, cols = np.mgrid[0:size, 0:size]
    x = cols - c
    y = rows - c
    xp, yp = shear_coords(e1, e2, x, y)
    img = profile.value(np.hypot(xp, yp) / profile.scale)
    total = img.sum()
    if total <= 0:
        raise ValueError("profile integrates to zero on this grid")
    return img * (flux / total)


@dataclass(frozen=True)
class MomentTensor:
    """Second-order brightness moments in pixel^2."""

    q11: float
    q12: float
    q22: float

    def __post_init__(self):
        if self.q11 < 0 or self.q22 < 0:
            raise ValueError("diagonal moments must be non-negative")
        det = self.q11 * self.q22 - self.q12**2
        if det < -1e-9 * max(self.q11 * self.q22, 1e-300):
            raise ValueError("moment tensor is not positive semidefinite")


def brightness_moments(img, weight: RadialProfile | None = None, max_iters: int = 50, tol: float = 1e-8) -> MomentTensor:
    """Flux-weighted central second moments of a star image.

    q_ij = sum_p w_p I_p (theta_i - c_i)(theta_j - c_j) / sum_p w_p I_p, with
    the centroid c computed from the same weights. When the weight profile is
    given it is centered on the current centroid estimate and the centroid is
    iterated to a fixed point (at most ``max_iters`` rounds, convergence
    ``tol`` pixels). Unit weight needs a single round.
    """
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise ValueError("image must be 2D")
    if np.any(img < 0) or not np.all(np.isfinite(img)):
        raise ValueError("intensities must be finite and non-negative")
    rows, cols = np.mgrid[0 : img.shape[0], 0 : img.shape[1]]
    x = cols.astype(float)
    y = rows.astype(float)

    if img.sum() <= 0:
        raise ValueError("image has no flux")
    xc = (img * x).sum() / img.sum()
    yc = (img * y).sum() / img.sum()

    for _ in range(max_iters):
        if weight is None:
            w = 1.0
        else:
            w = weight.value(np.hypot(x - xc, y - yc) / weight.scale)
        wi = w * img
        s = wi.sum()
        if s <= 0:
            raise ValueError("weighted flux vanished")
        xn = (wi * x).sum() / s
        yn = (wi * y).sum() / s
        shift = np.hypot(xn - xc, yn - yc)
        xc, yc = xn, yn
        if shift < tol:
            break
    else:
        raise RuntimeError("centroid iteration did not converge")

    dx = x - xc
    dy = y - yc
    q11 = (wi * dx * dx).sum() / s
    q22 = (wi * dy * dy).sum() / s
    q12 = (wi * dx * dy).sum() / s
    return MomentTensor(q11=q11, q12=q12, q22=q22)


def ellipticity_from_moments(q: MomentTensor, form: str = "squared") -> complex:
    """Complex ellipticity from a moment tensor.

    form="squared" uses squared diagonal terms:
        (q11^2 - q22^2 + 2i q12) / (q11^2 + q22^2 + 2 sqrt(q11 q22 - q12^2)).
    form="standard" is the unsquared quadrature-moment variant:
        (q11 - q22 + 2i q12) / (q11 + q22 + 2 sqrt(q11 q22 - q12^2)),
    which is the one with a known inverse under the shear used here.
    """
    disc = q.q11 * q.q22 - q.q12**2
    if disc < 0:
        raise ValueError("negative moment discriminant")
    root = np.sqrt(disc)
    if form == "squared":
        den = q.q11**2 + q.q22**2 + 2.0 * root
        num = q.q11**2 - q.q22**2 + 2j * q.q12
    elif form == "standard":
        den = q.q11 + q.q22 + 2.0 * root
        num = q.q11 - q.q22 + 2j * q.q12
    else:
        raise ValueError(f"unknown form {form!r}")
    if den <= 0:
        raise ValueError("non-positive moment denominator")
    return complex(num / den)


def psf_radius(q: MomentTensor) -> float:
    """sqrt(q11 + q22), the RMS size of the star image in pixels."""
    return float(np.sqrt(q.q11 + q.q22))
