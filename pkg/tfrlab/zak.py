"""Zak transform on the finite model and for analytic windows.

The finite transform splits a length-L signal into M = L/N decimated copies
and takes M-point FFTs across them. Scaling by sqrt(N dt) makes it unitary
for the dt-weighted norm, and with that scaling |Zg|^2 is exactly the
spectrum of the critical Gabor frame operator with time step N.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .config import SERIES_TAIL
from .core import FiniteSignal, TFPoint, TimeGrid, periodization_order, sample, same_grid
from .errors import ValidationError, require
from .gabor import FrameReport
from .windows import Gaussian, window_from_descriptor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZakMatrix:
    """values[n, m] ~ Zf((n0 + n)/N, m/M); ``x0 = n0/N`` is the left edge of the cell."""

    values: np.ndarray
    N: int
    M: int
    x0: float = 0.0
    source: FiniteSignal | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        require(v.shape == (self.N, self.M), "zak.bad_matrix",
                f"Zak matrix shape {v.shape} does not match N x M = {self.N} x {self.M}")
        if self.source is not None:
            require(self.source.length == self.N * self.M, "zak.bad_matrix",
                    f"source length {self.source.length} is not N*M = {self.N * self.M}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def L(self) -> int:
        return self.N * self.M

    @property
    def x_grid(self) -> np.ndarray:
        return self.x0 + np.arange(self.N) / self.N

    @property
    def omega_grid(self) -> np.ndarray:
        return np.arange(self.M) / self.M

    @property
    def cell_mass(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2)) / self.L

    def extended(self, n, m) -> np.ndarray:
        """Quasi-periodic extension: Z[n + qN, m] = e^{2 pi i q m/M} Z[n, m], M-periodic in m."""
        n = np.asarray(n)
        m = np.asarray(m)
        q, r = np.divmod(n, self.N)
        return np.exp(2j * np.pi * q * m / self.M) * self.values[r, m % self.M]


def _check_factor(L: int, N: int) -> int:
    require(int(N) == N and N >= 1 and L % int(N) == 0, "zak.bad_factor", f"N = {N} must divide L = {L}")
    return int(N)


def _scale(f: FiniteSignal, N: int) -> float:
    return math.sqrt(N * f.dt)


def zak_finite(f: FiniteSignal, N: int) -> ZakMatrix:
    L = f.length
    N = _check_factor(L, N)
    M = L // N
    n0 = f.grid.index_origin
    # row k of the reshape holds f[kN : (k+1)N]; FFT over k
    blocks = f.values.reshape(M, N)
    values = _scale(f, N) * np.fft.fft(blocks, axis=0).T
    return ZakMatrix(values, N, M, n0 / N, f)


def zak_inverse(Z: ZakMatrix, grid: TimeGrid | None = None) -> FiniteSignal:
    if grid is None:
        grid = Z.source.grid if Z.source is not None else TimeGrid.centered(Z.L)
    require(grid.length == Z.L, "zak.bad_matrix", f"grid length {grid.length} is not N*M = {Z.L}")
    blocks = np.fft.ifft(Z.values.T, axis=0) / math.sqrt(Z.N * grid.step)
    return FiniteSignal(blocks.reshape(-1), grid)


def _direct(f: FiniteSignal, N: int, n: np.ndarray, m: np.ndarray) -> np.ndarray:
    """sqrt(N dt) sum_k f[(n + kN) mod L] e^{-2 pi i k m/M} for arbitrary integer n, m."""
    L, M = f.length, f.length // N
    k = np.arange(M)
    idx = (n[:, None] + N * k[None, :]) % L
    phase = np.exp(-2j * np.pi * np.outer(k, m) / M)
    return _scale(f, N) * (f.values[idx] @ phase)


def quasiperiodicity_residual(Z: ZakMatrix, source: FiniteSignal | None = None) -> float:
    """Max deviation of the quasi-periodic extension from the defining sum over three cells each way.

    Every N x M array is the Zak matrix of its own inverse, so the check needs the
    signal the matrix claims to represent: ``source`` or the one attached to ``Z``.
    """
    f = source if source is not None else Z.source
    if f is None:
        raise ValidationError("zak.no_source",
                              "quasi-periodicity residual needs the source signal; a bare Zak matrix satisfies it trivially")
    require(f.length == Z.L, "zak.bad_matrix", f"source length {f.length} is not N*M = {Z.L}")
    n = np.arange(-Z.N, 2 * Z.N)
    m = np.arange(-Z.M, 2 * Z.M)
    direct = _direct(f, Z.N, n, m)
    ext = Z.extended(n[:, None], m[None, :])
    return float(np.max(np.abs(ext - direct)))


def covariance_residual(f: FiniteSignal, N: int, shift: int, bins: int) -> float:
    """Z(M_r T_s f)[n, m] against e^{2 pi i r (n + n0)/L} Zf(n - s, m - r) for integer sample/bin shifts."""
    from .core import tf_shift

    Zf = zak_finite(f, N)
    moved = tf_shift(f, TFPoint(shift * f.dt, bins * f.grid.freq_step))
    Zg = zak_finite(moved, N)
    n = np.arange(Zf.N)[:, None]
    m = np.arange(Zf.M)[None, :]
    n0 = f.grid.index_origin
    expected = np.exp(2j * np.pi * bins * (n + n0) / f.length) * Zf.extended(n - shift, m - bins)
    return float(np.max(np.abs(Zg.values - expected)))


# ---------------- Frames at critical density ----------------

def zak_frame_bounds(g: FiniteSignal, N: int) -> FrameReport:
    """Optimal bounds of the Gabor system with time step N samples and frequency step L/N bins."""
    Z = zak_finite(g, N)
    mag = np.abs(Z.values) ** 2
    logger.debug("zak bounds on L=%d, N=%d: min %.3e max %.3e", g.length, Z.N, mag.min(), mag.max())
    return FrameReport.from_bounds(float(mag.min()), float(mag.max()), "zak")


def diagonalization_residual(g: FiniteSignal, f: FiniteSignal, N: int) -> float:
    """|| Z(S f) - |Zg|^2 Zf ||_max for the critical system generated by g."""
    from .gabor import GaborSystem, frame_operator_apply

    same_grid(f, g)
    N = _check_factor(g.length, N)
    G = GaborSystem(g, N, g.length // N)
    lhs = zak_finite(frame_operator_apply(G, f), N).values
    rhs = np.abs(zak_finite(g, N).values) ** 2 * zak_finite(f, N).values
    return float(np.max(np.abs(lhs - rhs)))


# ---------------- Analytic windows ----------------

def zak_series(window, x, omega, K: int | None = None) -> np.ndarray:
    """Zg(x, omega) = sum_k g(x + k) e^{-2 pi i k omega} on the outer product of x and omega."""
    window = window_from_descriptor(window)
    if window.majorant(0.0) is None:
        raise ValidationError("zak.unbounded_tail", "series tail not bounded")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if K is None:
        K = periodization_order(window, 1.0, float(np.max(np.abs(x))), SERIES_TAIL)
    k = np.arange(-K, K + 1)
    samples = window(x[:, None] + k[None, :])
    return samples @ np.exp(-2j * np.pi * np.outer(k, omega))


def zak_zero_locate(window, refinement: int = 64) -> tuple[TFPoint, float]:
    """Grid argmin of |Zg| over the unit cell, re-evaluating the series at every refined point."""
    window = window_from_descriptor(window)
    r = int(refinement)
    require(r >= 2, "zak.bad_refinement", f"refinement must be >= 2, got {refinement}")
    # windows with jumps are sampled off their breakpoints (0 and +-1/2 for the built-ins)
    offset = 0.25 if window.breakpoints else 0.0
    x = (np.arange(r) + offset) / r
    omega = np.arange(r) / r
    mag = np.abs(zak_series(window, x, omega))
    i, j = np.unravel_index(int(np.argmin(mag)), mag.shape)
    logger.debug("zak zero scan of %s at refinement %d: min %.3e", window.kind, r, mag[i, j])
    return TFPoint(float(x[i]), float(omega[j])), float(mag[i, j])


def balian_low_evidence(lengths=(36, 64, 100, 144), offset: float = 0.5) -> pd.DataFrame:
    """min |Zg|^2 at critical density for the sampled Gaussian centered ``offset`` samples right of 0."""
    rows = []
    for L in lengths:
        N = math.isqrt(int(L))
        require(N * N == L, "zak.not_square", f"critical square lattice needs a square length, got {L}")
        grid = TimeGrid.centered(int(L))
        g = sample(Gaussian(), grid, center=offset * grid.step)
        report = zak_frame_bounds(g, N)
        rows.append({"L": int(L), "N": N, "A": report.A, "B": report.B})
    return pd.DataFrame(rows, columns=["L", "N", "A", "B"])
