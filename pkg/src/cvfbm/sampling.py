"""Random subsampling and matrix-free measurement operators.

Masks are (n, 2) integer position arrays in canonical row-major order. The
operators never materialize a matrix: selection picks grid values, and the
partial-Fourier mode composes selection with the unitary inverse DFT so the
unknown lives in the Fourier domain.
"""

from __future__ import annotations

import numpy as np

from .grid import SampleSet, as_field, dft2, idft2

__all__ = [
    "random_mask",
    "subsample",
    "MeasurementOperator",
    "coherence_spike_fourier",
    "sample_count_bound",
]


def random_mask(rows: int, cols: int, n_sub: int, seed) -> np.ndarray:
    """n_sub distinct grid positions, uniform without replacement.

    Deterministic in ``seed``; returned in canonical row-major order.
    """
    total = rows * cols
    if not 1 <= n_sub <= total:
        raise ValueError(f"n_sub must be in [1, {total}], got {n_sub}")
    rng = np.random.default_rng(seed)
    flat = np.sort(rng.choice(total, size=n_sub, replace=False))
    return np.stack(np.unravel_index(flat, (rows, cols)), axis=1).astype(np.int64)


def subsample(field, mask) -> SampleSet:
    """Read the field values at mask positions, in mask order."""
    f = as_field(field)
    pos = np.asarray(mask, dtype=np.int64).reshape(-1, 2)
    if len(pos) == 0:
        return SampleSet(f.shape[0], f.shape[1], pos, np.zeros(0, complex))
    if pos.min() < 0 or pos[:, 0].max() >= f.shape[0] or pos[:, 1].max() >= f.shape[1]:
        raise ValueError("mask position out of bounds")
    return SampleSet(f.shape[0], f.shape[1], pos, f[pos[:, 0], pos[:, 1]])


class MeasurementOperator:
    """Forward/adjoint pair for a sampling mask.

    mode="selection": forward picks masked grid values.
    mode="partial_fourier": forward is selection after the inverse DFT, so it
    measures spatial samples of a Fourier-domain unknown.
    """

    def __init__(self, rows: int, cols: int, mask, mode: str = "selection"):
        if mode not in ("selection", "partial_fourier"):
            raise ValueError(f"unknown operator mode {mode!r}")
        pos = np.asarray(mask, dtype=np.int64).reshape(-1, 2)
        if len(pos) == 0:
            raise ValueError("empty mask")
        if pos.min() < 0 or pos[:, 0].max() >= rows or pos[:, 1].max() >= cols:
            raise ValueError("mask position out of bounds")
        flat = pos[:, 0] * cols + pos[:, 1]
        if len(np.unique(flat)) != len(flat):
            raise ValueError("duplicate mask positions")
        self.rows = int(rows)
        self.cols = int(cols)
        self.mask = pos
        self.mode = mode
        self._flat = flat

    @property
    def n_measurements(self) -> int:
        return len(self._flat)

    def forward(self, x) -> np.ndarray:
        x = as_field(x)
        if x.shape != (self.rows, self.cols):
            raise ValueError(f"expected shape {(self.rows, self.cols)}, got {x.shape}")
        if self.mode == "partial_fourier":
            x = idft2(x)
        return x.ravel()[self._flat]

    def adjoint(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.complex128).reshape(-1)
        if len(y) != len(self._flat):
            raise ValueError("measurement vector length mismatch")
        z = np.zeros(self.rows * self.cols, dtype=np.complex128)
        z[self._flat] = y
        z = z.reshape(self.rows, self.cols)
        if self.mode == "partial_fourier":
            z = dft2(z)
        return z

    def norm_estimate(self, iters: int = 50, seed: int = 0) -> float:
        """Largest singular value by power iteration on A^H A."""
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((self.rows, self.cols)) + 1j * rng.standard_normal((self.rows, self.cols))
        x /= np.linalg.norm(x)
        s = 0.0
        for _ in range(iters):
            z = self.adjoint(self.forward(x))
            nz = np.linalg.norm(z)
            if nz == 0:
                return 0.0
            x = z / nz
            s = nz
        return float(np.sqrt(s))


def coherence_spike_fourier(n: int) -> float:
    """Coherence between the spike basis and the unitary DFT basis on C^n.

    sqrt(n) * max |<phi_k, psi_j>|; every unitary DFT entry has magnitude
    1/sqrt(n), so the value is exactly 1: the most incoherent pair, which is
    why random spatial samples of a Fourier-sparse signal work so well.
    """
    if n < 1:
        raise ValueError("n must be positive")
    return float(np.sqrt(n) * (1.0 / np.sqrt(n)))


def sample_count_bound(c: float, mu: float, k: int, n: int) -> float:
    """Advisory sample count C * mu^2 * K * log(N) for exact recovery.

    A guideline, not a guarantee; callers supply the constant C and the
    sparsity K.
    """
    if k < 1 or n < 2:
        raise ValueError("need k >= 1 and n >= 2")
    return float(c * mu**2 * k * np.log(n))
