"""Finite model: cyclic grids, signals, time-frequency shifts, Fourier transform, lattices.

The default grid is symmetric: ``dt = 1/sqrt(L)`` so the frequency step
``1/(L dt)`` equals the time step, and positions are centered
(``t0 = -(L//2) dt``). All shifts wrap modulo L.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import linalg, signal

from .config import GRID_ALIGNMENT_TOLERANCE, NORM_TOLERANCE, SERIES_TAIL, SYMMETRY_TOLERANCE
from .errors import ValidationError, require
from .windows import AnalyticWindow, window_from_descriptor

logger = logging.getLogger(__name__)


# ---------------- Grids and signals ----------------

@dataclass(frozen=True)
class TimeGrid:
    length: int
    step: float
    origin: float = 0.0

    def __post_init__(self):
        require(int(self.length) == self.length and self.length >= 2, "core.bad_grid",
                f"grid length must be an integer >= 2, got {self.length}")
        require(self.step > 0 and math.isfinite(self.step), "core.bad_grid", f"grid step must be > 0, got {self.step}")
        require(math.isfinite(self.origin), "core.bad_grid", "grid origin must be finite")
        object.__setattr__(self, "length", int(self.length))

    @classmethod
    def centered(cls, length: int, step: float | None = None) -> TimeGrid:
        step = 1 / math.sqrt(length) if step is None else step
        return cls(length, step, -(length // 2) * step)

    @property
    def index_origin(self) -> float:
        """Origin in units of the step; fractional for grids offset from the multiples of the step."""
        return self.origin / self.step

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.length) + self.index_origin

    @property
    def times(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.length)

    @property
    def freq_step(self) -> float:
        return 1 / (self.length * self.step)

    def frequency_grid(self) -> TimeGrid:
        return TimeGrid(self.length, self.freq_step, -(self.length // 2) * self.freq_step)

    @property
    def is_symmetric(self) -> bool:
        return math.isclose(self.step, self.freq_step, rel_tol=1e-12)

    def index_of(self, t: float, what: str = "time shift") -> int:
        """Integer number of steps represented by ``t``; raises if ``t`` is off the grid."""
        s = t / self.step
        k = round(s)
        if abs(s - k) > GRID_ALIGNMENT_TOLERANCE * max(1.0, abs(s)):
            raise ValidationError("core.off_grid_shift", f"off-grid {what}: {t} is not a multiple of {self.step}")
        return int(k)


@dataclass(frozen=True)
class FiniteSignal:
    values: np.ndarray
    grid: TimeGrid

    def __post_init__(self):
        v = np.array(self.values, dtype=complex).ravel()
        require(v.size == self.grid.length, "core.length_mismatch",
                f"signal has {v.size} values but the grid has {self.grid.length} points")
        require(bool(np.all(np.isfinite(v))), "core.non_finite", "signal contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def length(self) -> int:
        return self.grid.length

    @property
    def dt(self) -> float:
        return self.grid.step

    @property
    def norm(self) -> float:
        return math.sqrt(self.dt * float(np.vdot(self.values, self.values).real))

    def with_values(self, values) -> FiniteSignal:
        return FiniteSignal(values, self.grid)

    def scaled(self, c: complex) -> FiniteSignal:
        return FiniteSignal(c * self.values, self.grid)

    def normalized(self) -> FiniteSignal:
        n = self.norm
        require(n > 0, "core.zero_signal", "cannot normalize the zero signal")
        return self.scaled(1 / n)

    def __add__(self, other: FiniteSignal) -> FiniteSignal:
        same_grid(self, other)
        return FiniteSignal(self.values + other.values, self.grid)

    def __sub__(self, other: FiniteSignal) -> FiniteSignal:
        same_grid(self, other)
        return FiniteSignal(self.values - other.values, self.grid)


def same_grid(f: FiniteSignal, g: FiniteSignal) -> None:
    require(f.grid.length == g.grid.length and math.isclose(f.grid.step, g.grid.step, rel_tol=1e-12),
            "core.grid_mismatch", f"signals live on different grids: {f.grid} vs {g.grid}")


def inner(f: FiniteSignal, g: FiniteSignal) -> complex:
    """dt-weighted inner product, linear in the first argument."""
    same_grid(f, g)
    return complex(f.dt * np.vdot(g.values, f.values))


def random_signal(grid: TimeGrid, rng: np.random.Generator, normalize: bool = True) -> FiniteSignal:
    f = FiniteSignal(rng.standard_normal(grid.length) + 1j * rng.standard_normal(grid.length), grid)
    return f.normalized() if normalize else f


def reflect(f: FiniteSignal) -> FiniteSignal:
    """Cyclic flip of the samples: index n goes to -n mod L, sample 0 stays put.

    This is f(2 t0 - t) for grid origin t0; on even centered grids it is f(-t).
    """
    return f.with_values(f.values[(-np.arange(f.length)) % f.length])


@dataclass(frozen=True)
class TFPoint:
    x: float
    omega: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.omega], dtype=float)


@dataclass(frozen=True)
class SeriesResult:
    """A truncated series value with a bound on the neglected tail."""

    value: complex
    tail_bound: float


# ---------------- Sampling windows onto the grid ----------------

def periodization_order(window: AnalyticWindow, period: float, extent: float, tail: float = SERIES_TAIL) -> int:
    """Smallest K with sum_{|k|>K} |f(t + k*period)| < tail for all |t| <= extent."""
    if window.majorant(0.0) is None:
        raise ValidationError("core.non_summable", "non-absolutely-summable periodization")
    hi = 1
    while series_tail_bound(window, period, extent, hi) >= tail:
        hi *= 2
        if hi > 4096:
            raise ValidationError("core.slow_tail", f"{window.kind} needs more than 4096 periodization terms")
    lo = 0
    while lo < hi:
        mid = (lo + hi) // 2
        if series_tail_bound(window, period, extent, mid) < tail:
            hi = mid
        else:
            lo = mid + 1
    return lo


def series_tail_bound(window: AnalyticWindow, alpha: float, t_abs: float, K: int, fourier_side: bool = False) -> float:
    m = window.fourier_majorant if fourier_side else window.majorant
    r0 = alpha * (K + 1) - t_abs
    if r0 <= 0:
        return math.inf
    # sum over k > K of m(alpha k - |t|) <= m(r0) + integral_{r0}^inf m / alpha, on both sides
    return 2 * (float(m(r0)) + window.majorant_integral(r0, fourier_side) / alpha)


def sample(window, grid: TimeGrid, center: float = 0.0, periodize: bool = True) -> FiniteSignal:
    """Evaluate a window on the grid, optionally folding in its translates by the grid period."""
    window = window_from_descriptor(window)
    t = grid.times - center
    values = window(t)
    if periodize and window.majorant(0.0) is not None:
        period = grid.length * grid.step
        try:
            K = periodization_order(window, period, float(np.max(np.abs(t))))
        except ValidationError as exc:
            logger.warning("sampling %s without periodization: %s", window.kind, exc.message)
            K = 0
        for k in range(1, K + 1):
            values = values + window(t + k * period) + window(t - k * period)
        logger.debug("sampled %s on L=%d with %d periodization terms", window.kind, grid.length, K)
    return FiniteSignal(values, grid)


def periodize(f, alpha: float, t: float, K: int) -> SeriesResult:
    """sum_{|k|<=K} f(t + alpha k) and a bound on the omitted terms."""
    f = window_from_descriptor(f)
    require(alpha > 0, "core.bad_period", f"period must be > 0, got {alpha}")
    require(K >= 0, "core.bad_truncation", f"truncation must be >= 0, got {K}")
    if f.majorant(0.0) is None:
        raise ValidationError("core.non_summable", "non-absolutely-summable periodization")
    k = np.arange(-K, K + 1)
    value = complex(np.sum(f(t + alpha * k)))
    return SeriesResult(value, series_tail_bound(f, alpha, abs(t), K))


# ---------------- Time-frequency shifts ----------------

def translate(f: FiniteSignal, x: float) -> FiniteSignal:
    s = f.grid.index_of(x)
    return f.with_values(np.roll(f.values, s))


def modulate(f: FiniteSignal, omega: float) -> FiniteSignal:
    return f.with_values(np.exp(2j * np.pi * omega * f.grid.times) * f.values)


def tf_shift(f: FiniteSignal, lam: TFPoint) -> FiniteSignal:
    """pi(lam) f = M_omega T_x f."""
    return modulate(translate(f, lam.x), lam.omega)


def symmetric_tf_shift(f: FiniteSignal, lam: TFPoint) -> FiniteSignal:
    """rho(lam) f = e^{-pi i x omega} pi(lam) f."""
    return tf_shift(f, lam).scaled(np.exp(-1j * np.pi * lam.x * lam.omega))


# ---------------- Fourier transform ----------------

def grid_dft(values: np.ndarray, step: float, n0: float, k0: int, axis: int = -1) -> np.ndarray:
    """step * sum_n v[n] e^{-2 pi i (k + k0)(n + n0) / L} along ``axis``."""
    v = np.moveaxis(np.asarray(values, dtype=complex), axis, -1)
    L = v.shape[-1]
    n = np.arange(L)
    out = np.fft.fft(v * np.exp(-2j * np.pi * k0 * n / L), axis=-1)
    out *= step * np.exp(-2j * np.pi * (n + k0) * n0 / L)
    return np.moveaxis(out, -1, axis)


def grid_idft(values: np.ndarray, step: float, n0: float, k0: int, axis: int = -1) -> np.ndarray:
    """step * sum_k V[k] e^{+2 pi i (k + k0)(n + n0) / L}; the inverse of ``grid_dft`` up to weights."""
    v = np.moveaxis(np.asarray(values, dtype=complex), axis, -1)
    L = v.shape[-1]
    k = np.arange(L)
    out = L * np.fft.ifft(v * np.exp(2j * np.pi * (k + k0) * n0 / L), axis=-1)
    out *= step * np.exp(2j * np.pi * k0 * k / L)
    return np.moveaxis(out, -1, axis)


def fourier(f: FiniteSignal) -> FiniteSignal:
    """Centered DFT with continuum normalization; the result lives on the centered frequency grid."""
    fgrid = f.grid.frequency_grid()
    k0 = -(f.length // 2)
    return FiniteSignal(grid_dft(f.values, f.dt, f.grid.index_origin, k0), fgrid)


def inverse_fourier(F: FiniteSignal, grid: TimeGrid | None = None) -> FiniteSignal:
    grid = TimeGrid.centered(F.length, 1 / (F.length * F.dt)) if grid is None else grid
    k0 = F.grid.index_of(F.grid.origin, "frequency origin")
    return FiniteSignal(grid_idft(F.values, F.dt, grid.index_origin, k0), grid)


def gaussian_ft_closed_form(M, omega) -> complex:
    """det(M)^{-1/2} exp(-pi omega . M^{-1} omega), the Fourier transform of exp(-pi x . M x)."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    require(M.shape[0] == M.shape[1] == omega.size, "core.bad_matrix",
            f"matrix {M.shape} and frequency of size {omega.size} do not match")
    require(np.allclose(M, M.T, atol=SYMMETRY_TOLERANCE), "core.bad_matrix", "matrix is not symmetric")
    eig = linalg.eigvalsh(M)
    require(bool(np.all(eig > 0)), "core.bad_matrix", f"matrix is not positive definite (eigenvalues {eig})")
    quad = float(omega @ linalg.solve(M, omega, assume_a="pos"))
    return complex(np.prod(eig) ** -0.5 * math.exp(-np.pi * quad))


# ---------------- Symplectic structure and lattices ----------------

def standard_symplectic(d: int = 1) -> np.ndarray:
    I = np.eye(d)
    Z = np.zeros((d, d))
    return np.block([[Z, I], [-I, Z]])


def symplectic_form(z1, z2) -> float:
    """sigma(z1, z2) = z1 . J z2 = x1 . omega2 - omega1 . x2."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    return float(z1 @ standard_symplectic(z1.size // 2) @ z2)


def is_symplectic(S, tol: float = 1e-12) -> bool:
    S = np.asarray(S, dtype=float)
    require(S.ndim == 2 and S.shape[0] == S.shape[1], "core.bad_matrix", f"matrix must be square, got {S.shape}")
    require(S.shape[0] % 2 == 0, "core.bad_matrix", "symplectic test needs an even dimension")
    require(tol > 0, "core.bad_matrix", "tolerance must be positive")
    J = standard_symplectic(S.shape[0] // 2)
    return bool(np.max(np.abs(S.T @ J @ S - J)) <= tol)


def shear(Q) -> np.ndarray:
    """(x, omega) -> (x, Qx + omega)."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    d = Q.shape[0]
    return np.block([[np.eye(d), np.zeros((d, d))], [Q, np.eye(d)]])


def dilation_matrix(A) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    d = A.shape[0]
    return np.block([[A, np.zeros((d, d))], [np.zeros((d, d)), linalg.inv(A).T]])


@dataclass(frozen=True)
class Lattice:
    generator: np.ndarray = field(repr=False)

    def __post_init__(self):
        M = np.array(self.generator, dtype=float)
        require(M.ndim == 2 and M.shape[0] == M.shape[1] and M.shape[0] >= 1, "core.bad_lattice",
                f"lattice generator must be square, got {M.shape}")
        require(abs(linalg.det(M)) > 0, "core.bad_lattice", "lattice generator is singular")
        M.flags.writeable = False
        object.__setattr__(self, "generator", M)

    @classmethod
    def separable(cls, alpha: float, beta: float) -> Lattice:
        return cls(np.diag([alpha, beta]))

    @property
    def ambient_dim(self) -> int:
        return self.generator.shape[0]

    @property
    def dim(self) -> int:
        require(self.ambient_dim % 2 == 0, "core.odd_dimension", "adjoint defined only in phase space")
        return self.ambient_dim // 2

    @property
    def volume(self) -> float:
        return abs(float(linalg.det(self.generator)))

    @property
    def density(self) -> float:
        return 1 / self.volume

    # Only lattices are supported, where upper and lower Beurling density coincide with the density.
    beurling_density = density

    def points(self, K: int) -> np.ndarray:
        """All points M k with k in [-K, K]^n, one per row."""
        axes = [np.arange(-K, K + 1)] * self.ambient_dim
        ks = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.ambient_dim)
        return ks @ self.generator.T

    def contains(self, z, tol: float = 1e-9) -> bool:
        k = linalg.solve(self.generator, np.asarray(z, dtype=float))
        return bool(np.max(np.abs(k - np.round(k))) <= tol)

    def same_as(self, other: Lattice, tol: float = 1e-9) -> bool:
        """Equal as sets: each generator is an integer unimodular combination of the other."""
        U = linalg.solve(self.generator, other.generator)
        return bool(np.max(np.abs(U - np.round(U))) <= tol and abs(abs(linalg.det(np.round(U))) - 1) <= tol)


def lattice_dual(lattice: Lattice) -> Lattice:
    return Lattice(linalg.inv(lattice.generator).T)


def lattice_adjoint(lattice: Lattice) -> Lattice:
    if lattice.ambient_dim % 2:
        raise ValidationError("core.odd_dimension", "adjoint defined only in phase space")
    return Lattice(standard_symplectic(lattice.dim) @ linalg.inv(lattice.generator).T)


def symplectic_poisson_check(lattice: Lattice, z, K: int = 8) -> tuple[complex, complex, float]:
    """Both sides of sum_Lambda F(lambda + z) = vol^{-1} sum_adjoint F_sigma F(mu) e^{2 pi i sigma(mu, z)}.

    F is the phase-space Gaussian exp(-pi |z|^2), its own symplectic Fourier transform.
    """
    require(lattice.ambient_dim == 2, "core.bad_lattice", "symplectic Poisson check runs in the time-frequency plane")
    z = np.asarray(z, dtype=float)
    gauss = lambda p: np.exp(-np.pi * np.sum(p * p, axis=-1))
    lhs = complex(np.sum(gauss(lattice.points(K) + z)))
    adj = lattice_adjoint(lattice).points(K)
    J = standard_symplectic(1)
    phases = np.exp(2j * np.pi * (adj @ J @ z))
    rhs = complex(np.sum(gauss(adj) * phases) / lattice.volume)
    return lhs, rhs, abs(lhs - rhs)


# ---------------- Metaplectic generators ----------------

METAPLECTIC_KINDS = ("fourier_J", "dilation", "chirp")


def metaplectic_generator(kind: str, f: FiniteSignal, param=None) -> FiniteSignal:
    """Apply J-hat (``fourier_J``), D-hat (``dilation``, param = factor) or V-hat_Q (``chirp``, param = Q)."""
    if kind == "fourier_J":
        F = fourier(f)
        return FiniteSignal(np.exp(-1j * np.pi / 4) * F.values, F.grid)
    if kind == "chirp":
        Q = 0.0 if param is None else float(param)
        return f.with_values(np.exp(1j * np.pi * Q * f.grid.times ** 2) * f.values)
    if kind == "dilation":
        require(param is not None, "core.bad_dilation", "dilation needs a factor")
        return _dilate(f, float(param))
    raise ValidationError("core.unknown_generator", f"unknown metaplectic generator {kind!r}; known: {METAPLECTIC_KINDS}")


def _dilate(f: FiniteSignal, r: float) -> FiniteSignal:
    """D_r f(t) = r^{-1/2} f(t / r) by polyphase resampling of the periodic data."""
    not_realizable = ValidationError("core.dilation_not_realizable", "dilation not grid-realizable")
    if not (math.isfinite(r) and r > 0):
        raise not_realizable
    frac = Fraction(r).limit_denominator(1024)
    if abs(float(frac) - r) > 1e-12 or not (0.5 <= r <= 2.0):
        raise not_realizable
    p, q = frac.numerator, frac.denominator
    L = f.length
    n0 = f.grid.index_of(f.grid.origin, "grid origin")
    start = n0 - L
    if (start * p) % q:
        raise not_realizable
    y = signal.resample_poly(np.tile(f.values, 3), p, q, window=("kaiser", 10.0))
    # y[m] ~ f at position start + m q / p; the target positions are (n + n0) q / p
    m = np.arange(L) + n0 - start * p // q
    out = f.with_values(y[m] / math.sqrt(r))
    err = abs(out.norm - f.norm) / max(f.norm, NORM_TOLERANCE)
    if err > 1e-6:
        logger.warning("dilation by %s: resampling changed the norm by %.2e", frac, err)
    return out
