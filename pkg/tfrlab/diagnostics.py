"""Uncertainty-principle checks and amalgam norms on the finite model.

Each check returns the two sides it compares; the caller decides on slack.
Position acts on the centered grid times, momentum through the spectrum.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .config import NORM_TOLERANCE
from .core import FiniteSignal, TimeGrid, fourier
from .errors import ValidationError, require
from .tfr import TFMatrix, stft

logger = logging.getLogger(__name__)


def _require_nonzero(f: FiniteSignal) -> None:
    if f.norm == 0:
        raise ValidationError("diagnostics.zero_signal", "uncertainty product of the zero signal")


def _as_indices(s, L: int, what: str) -> np.ndarray:
    s = np.asarray(s)
    if s.dtype == bool:
        require(s.size == L, "diagnostics.bad_set", f"{what} mask has {s.size} entries, grid has {L}")
        return np.flatnonzero(s)
    idx = np.unique(s.astype(int))
    require(idx.size == 0 or (idx.min() >= 0 and idx.max() < L), "diagnostics.bad_set",
            f"{what} indices must lie in [0, {L})")
    return idx


def interval_set(grid: TimeGrid, lo: float, hi: float) -> np.ndarray:
    """Indices of grid points with lo <= t <= hi."""
    t = grid.times
    return np.flatnonzero((t >= lo) & (t <= hi))


# ---------------- Heisenberg ----------------

def hpw_product(f: FiniteSignal, a: float = 0.0, b: float = 0.0) -> tuple[float, float]:
    """(||(X - a) f|| ||(P - b) f||, ||f||^2 / (4 pi))."""
    _require_nonzero(f)
    spread_x = math.sqrt(f.dt * float(np.sum(np.abs((f.grid.times - a) * f.values) ** 2)))
    F = fourier(f)
    spread_w = math.sqrt(F.dt * float(np.sum(np.abs((F.grid.times - b) * F.values) ** 2)))
    return spread_x * spread_w, f.norm ** 2 / (4 * math.pi)


# ---------------- Concentration ----------------

def donoho_stark_check(f: FiniteSignal, T_set, Omega_set) -> tuple[float, float, float]:
    """(eps_T, eps_Omega, |T||Omega| - (1 - eps_T - eps_Omega)^2) with |T| = #T dt and |Omega| = #Omega domega."""
    _require_nonzero(f)
    L = f.length
    T = _as_indices(T_set, L, "time set")
    W = _as_indices(Omega_set, L, "frequency set")
    F = fourier(f)
    off_t = np.ones(L, dtype=bool)
    off_t[T] = False
    off_w = np.ones(L, dtype=bool)
    off_w[W] = False
    n = f.norm
    eps_t = math.sqrt(f.dt * float(np.sum(np.abs(f.values[off_t]) ** 2))) / n
    eps_w = math.sqrt(F.dt * float(np.sum(np.abs(F.values[off_w]) ** 2))) / n
    measure = T.size * f.dt * W.size * F.dt
    return eps_t, eps_w, measure - (1 - eps_t - eps_w) ** 2


def hilbert_schmidt_norm(T_set, Omega_set, grid: TimeGrid) -> float:
    """||P_Omega Q_T||_HS from the unitary DFT matrix entries."""
    L = grid.length
    T = _as_indices(T_set, L, "time set")
    W = _as_indices(Omega_set, L, "frequency set")
    if T.size == 0 or W.size == 0:
        return 0.0
    cols = np.fft.fft(np.eye(L)[:, T], axis=0, norm="ortho")
    return float(np.linalg.norm(cols[W, :]))


def weak_up_stft(f: FiniteSignal, g: FiniteSignal, U_set) -> tuple[float, float]:
    """(mass of |V_g f|^2 on U, measure of U) for unit-norm f and g; U is a mask on the STFT grid."""
    for name, s in (("f", f), ("g", g)):
        if abs(s.norm - 1) > NORM_TOLERANCE:
            raise ValidationError("diagnostics.unnormalized", f"weak uncertainty principle needs ||{name}|| = 1, measured {s.norm!r}")
    V = stft(f, g)
    U = np.asarray(U_set, dtype=bool)
    require(U.shape == V.shape, "diagnostics.bad_set", f"region mask {U.shape} does not match the STFT grid {V.shape}")
    mass = float(np.sum(np.abs(V.values[U]) ** 2)) * V.cell_area
    return mass, int(U.sum()) * V.cell_area


def disc_region(V: TFMatrix, radius: float, center: tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
    x = V.x_grid[:, None] - center[0]
    w = V.omega_grid[None, :] - center[1]
    return x * x + w * w <= radius * radius


def lieb_check(f: FiniteSignal, g: FiniteSignal, p: float) -> tuple[float, float]:
    """(int int |V_g f|^p, (2/p) (||f|| ||g||)^p); the first is <= the second for p > 2 and >= for p < 2."""
    require(p >= 1, "diagnostics.bad_exponent", f"Lieb exponent must be >= 1, got {p}")
    V = stft(f, g)
    lhs = float(np.sum(np.abs(V.values) ** p)) * V.cell_area
    return lhs, (2 / p) * (f.norm * g.norm) ** p


def lieb_direction_holds(lhs: float, rhs: float, p: float, tol: float = 1e-6) -> bool:
    if p > 2:
        return lhs <= rhs * (1 + tol)
    if p < 2:
        return lhs >= rhs * (1 - tol)
    return math.isclose(lhs, rhs, rel_tol=tol)


# ---------------- Wiener amalgam ----------------

def amalgam_norm(f: FiniteSignal, block: int) -> float:
    """Sum over consecutive blocks of the largest modulus inside each block."""
    require(int(block) == block and block >= 1 and f.length % int(block) == 0, "diagnostics.bad_block",
            f"block {block} must divide L = {f.length}")
    return float(np.sum(np.abs(f.values).reshape(-1, int(block)).max(axis=1)))
