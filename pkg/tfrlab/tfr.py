"""Time-frequency representations on the finite model.

Everything is derived from one STFT kernel: the ambiguity function is a phase
factor away from it, the Wigner distribution is the ambiguity function against
the reflected window on the half-step grid, and the Rihaczek distribution is
tied to it through the symplectic Fourier transform. Continuum values at
arbitrary points are available for closed-form windows via ``stft_at``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from .config import GRID_ALIGNMENT_TOLERANCE, NORM_TOLERANCE, SYNTHESIS_PAIR_TOLERANCE
from .core import (
    FiniteSignal,
    TFPoint,
    TimeGrid,
    fourier,
    grid_dft,
    grid_idft,
    inner,
    same_grid,
)
from .errors import NumericalError, ValidationError, require
from .windows import window_from_descriptor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TFMatrix:
    """values[i, j] sampled at (x0 + i dx, omega0 + j domega)."""

    values: np.ndarray
    x0: float
    dx: float
    omega0: float
    domega: float
    repr: str = "stft"
    window: str | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        require(v.ndim == 2 and v.size > 0, "tfr.bad_matrix", f"TFMatrix needs a non-empty 2-D array, got {v.shape}")
        require(self.dx > 0 and self.domega > 0, "tfr.bad_matrix", "grid steps must be positive")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def x_grid(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.shape[0])

    @property
    def omega_grid(self) -> np.ndarray:
        return self.omega0 + self.domega * np.arange(self.shape[1])

    @property
    def cell_area(self) -> float:
        return self.dx * self.domega

    def index(self, x: float, omega: float) -> tuple[int, int]:
        i = int(round((x - self.x0) / self.dx))
        j = int(round((omega - self.omega0) / self.domega))
        require(0 <= i < self.shape[0] and 0 <= j < self.shape[1], "tfr.off_grid",
                f"point ({x}, {omega}) lies outside the grid")
        return i, j

    def at(self, x: float, omega: float) -> complex:
        return complex(self.values[self.index(x, omega)])

    def with_values(self, values, repr: str | None = None) -> TFMatrix:
        return replace(self, values=values, repr=repr or self.repr)


def _window_name(g: FiniteSignal) -> str:
    return f"L={g.length}"


# ---------------- Linear representation ----------------

def stft(f: FiniteSignal, g: FiniteSignal, time_hop: int = 1) -> TFMatrix:
    """V_g f on a centered grid: time step a*dt, all L frequencies.

    Row m is the centered Fourier transform of f * conj(T_{x_m} g).
    """
    same_grid(f, g)
    L, dt = f.length, f.dt
    a = int(time_hop)
    require(a >= 1 and L % a == 0, "tfr.bad_hop", f"time hop {time_hop} must divide L = {L}")
    if not np.any(g.values):
        raise ValidationError("tfr.zero_window", "zero window")
    n_rows = L // a
    m0 = -(n_rows // 2)
    shifts = (np.arange(n_rows) + m0) * a
    idx = (np.arange(L)[None, :] - shifts[:, None]) % L
    prods = f.values[None, :] * np.conj(g.values[idx])
    k0 = -(L // 2)
    values = grid_dft(prods, dt, f.grid.index_origin, k0, axis=1)
    df = f.grid.freq_step
    return TFMatrix(values, m0 * a * dt, a * dt, k0 * df, df, "stft", _window_name(g))


def istft(V: TFMatrix, g: FiniteSignal, gtilde: FiniteSignal) -> FiniteSignal:
    """(1/<gtilde, g>) sum V(lam) pi(lam) gtilde with Riemann weights; needs a full (hop 1) STFT."""
    same_grid(g, gtilde)
    L, dt = g.length, g.dt
    require(V.shape == (L, L) and math.isclose(V.dx, dt, rel_tol=1e-12), "tfr.bad_hop",
            "exact inversion needs an STFT computed with time hop 1")
    pair = inner(gtilde, g)
    if abs(pair) <= SYNTHESIS_PAIR_TOLERANCE * g.norm * gtilde.norm:
        raise NumericalError("tfr.ill_conditioned_pair", "ill-conditioned synthesis pair")
    k0 = int(round(V.omega0 / V.domega))
    rows = grid_idft(V.values, V.domega, g.grid.index_origin, k0, axis=1)
    m0 = int(round(V.x0 / V.dx))
    shifts = np.arange(L) + m0
    idx = (np.arange(L)[None, :] - shifts[:, None]) % L
    values = dt * np.sum(rows * gtilde.values[idx], axis=0) / pair
    return FiniteSignal(values, g.grid)


# ---------------- Quadratic representations ----------------

def spectrogram(f: FiniteSignal, g: FiniteSignal) -> TFMatrix:
    norm = g.norm
    if abs(norm - 1) > NORM_TOLERANCE:
        raise ValidationError("tfr.unnormalized_window", f"spectrogram window must have unit norm, measured {norm!r}")
    V = stft(f, g)
    return V.with_values(np.abs(V.values) ** 2, "spectrogram")


def rihaczek(f: FiniteSignal, g: FiniteSignal) -> TFMatrix:
    """f(x) conj(g_hat(omega)) e^{-2 pi i x omega} on the signal grid times the frequency grid."""
    same_grid(f, g)
    G = fourier(g)
    t = f.grid.times
    w = G.grid.times
    values = f.values[:, None] * np.conj(G.values)[None, :] * np.exp(-2j * np.pi * np.outer(t, w))
    return TFMatrix(values, f.grid.origin, f.dt, G.grid.origin, G.dt, "rihaczek", _window_name(g))


def ambiguity(f: FiniteSignal, g: FiniteSignal) -> TFMatrix:
    """A(f, g)(x, omega) = e^{pi i x omega} V_g f(x, omega)."""
    V = stft(f, g)
    phase = np.exp(1j * np.pi * np.outer(V.x_grid, V.omega_grid))
    return V.with_values(phase * V.values, "ambiguity")


def ambiguity_peak(f: FiniteSignal, echo: FiniteSignal | None = None) -> tuple[TFPoint, float]:
    """Grid argmax of |A f|, or of |A(echo, f)| to estimate the lag of an echo."""
    if f.norm == 0 or (echo is not None and echo.norm == 0):
        raise ValidationError("tfr.zero_signal", "ambiguity peak of the zero signal")
    A = ambiguity(f, f) if echo is None else ambiguity(echo, f)
    mag = np.abs(A.values)
    i, j = np.unravel_index(int(np.argmax(mag)), mag.shape)
    return TFPoint(float(A.x_grid[i]), float(A.omega_grid[j])), float(mag[i, j])


def wigner(f: FiniteSignal, g: FiniteSignal) -> TFMatrix:
    """W(f, g)(x, omega) = 2 e^{4 pi i x omega} V_{g reflected} f(2x, 2omega) on the half-step grid.

    The grid covers the central half of the time and frequency ranges. For f = g the
    values are real and the even rows and columns carry the exact marginals. On grids
    whose origin is not a whole number of steps the data are moved to the nearest such
    grid and the result is shifted back, using W(T_c f, T_c g)(x) = W(f, g)(x - c).

    ``symplectic_ft(ambiguity(f, g))`` agrees with this grid only up to aliasing of
    the half-sample phase, which is negligible for signals that are small near the
    edges of the time and frequency ranges and of order one for white noise.
    """
    same_grid(f, g)
    grid = f.grid
    n0 = round(grid.index_origin)
    offset = grid.origin - n0 * grid.step
    if abs(offset) <= GRID_ALIGNMENT_TOLERANCE * grid.step:
        offset = 0.0
    else:
        grid = TimeGrid(grid.length, grid.step, n0 * grid.step)
        f, g = FiniteSignal(f.values, grid), FiniteSignal(g.values, grid)
    # position p goes to -p, i.e. index j to -j - 2 n0
    mirrored = g.with_values(g.values[(-np.arange(g.length) - 2 * n0) % g.length])
    A = ambiguity(f, mirrored)
    return TFMatrix(2 * A.values, A.x0 / 2 + offset, A.dx / 2, A.omega0 / 2, A.domega / 2, "wigner", A.window)


def symplectic_ft(F: TFMatrix) -> TFMatrix:
    """F_sigma F(z) = sum F(z') e^{-2 pi i sigma(z', z)} dz' on a square centered grid; involutive."""
    n, n_omega = F.shape
    require(n == n_omega, "tfr.non_square_grid", f"symplectic Fourier transform needs a square grid, got {F.shape}")
    j0 = F.x0 / F.dx
    k0 = F.omega0 / F.domega
    require(math.isclose(n * F.dx * F.domega, 1.0, rel_tol=1e-9)
            and math.isclose(j0, -(n // 2), abs_tol=1e-9) and math.isclose(k0, -(n // 2), abs_tol=1e-9),
            "tfr.non_square_grid", "symplectic Fourier transform needs a centered grid with n dx domega = 1")
    c = -(n // 2)
    # sum over x' against e^{-2 pi i x' omega}, then over omega' against e^{+2 pi i omega' x}
    G = grid_dft(F.values, 1.0, c, c, axis=0)
    out = grid_idft(G, 1.0, c, c, axis=1).T / n
    return F.with_values(out, f"symplectic_ft({F.repr})")


def mixed_norm(F: TFMatrix, p: float, q: float) -> float:
    """(int (int |F|^p dx)^{q/p} domega)^{1/q}; infinite exponents take grid maxima."""
    for name, e in (("p", p), ("q", q)):
        require(e >= 1, "tfr.bad_exponent", f"mixed-norm exponent {name} must be >= 1, got {e}")
    mag = np.abs(F.values)
    inner_norm = mag.max(axis=0) if math.isinf(p) else (np.sum(mag ** p, axis=0) * F.dx) ** (1 / p)
    if math.isinf(q):
        return float(inner_norm.max())
    return float((np.sum(inner_norm ** q) * F.domega) ** (1 / q))


# ---------------- Continuum evaluation for closed-form windows ----------------

def oscillatory_quad(h, lo: float, hi: float, omega: float) -> complex:
    """int_lo^hi h(t) e^{-2 pi i omega t} dt for complex h, split into cos/sin weighted parts."""
    re = lambda t: complex(h(t)).real
    im = lambda t: complex(h(t)).imag
    opts = dict(limit=400, epsabs=1e-14, epsrel=1e-12)
    if omega == 0:
        return complex(integrate.quad(re, lo, hi, **opts)[0], integrate.quad(im, lo, hi, **opts)[0])
    w = 2 * np.pi * omega
    rc = integrate.quad(re, lo, hi, weight="cos", wvar=w, **opts)[0]
    rs = integrate.quad(re, lo, hi, weight="sin", wvar=w, **opts)[0]
    ic = integrate.quad(im, lo, hi, weight="cos", wvar=w, **opts)[0]
    is_ = integrate.quad(im, lo, hi, weight="sin", wvar=w, **opts)[0]
    return complex(rc + is_, ic - rs)


def stft_at(f, g, x: float, omega: float) -> complex:
    """V_g f(x, omega) = int f(t) conj(g(t - x)) e^{-2 pi i omega t} dt by adaptive quadrature."""
    f = window_from_descriptor(f)
    g = window_from_descriptor(g)
    flo, fhi = f.support()
    glo, ghi = g.support()
    lo, hi = max(flo, glo + x), min(fhi, ghi + x)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValidationError("tfr.unbounded_support", f"cannot integrate {f.kind} against {g.kind}: unbounded support")
    if hi <= lo:
        return 0j
    cuts = sorted({lo, hi, *(p for p in f.breakpoints if lo < p < hi), *(p + x for p in g.breakpoints if lo < p + x < hi)})
    h = lambda t: complex(f(t)) * np.conj(complex(g(t - x)))
    return sum(oscillatory_quad(h, u, v, omega) for u, v in zip(cuts[:-1], cuts[1:]))


def ambiguity_at(f, g, x: float, omega: float) -> complex:
    return np.exp(1j * np.pi * x * omega) * stft_at(f, g, x, omega)
