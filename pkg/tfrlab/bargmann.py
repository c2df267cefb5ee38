"""Bargmann transform, Fock-space quadrature and Hermite functions.

The transform integrand is written as ``f(t) e^{-pi (t - z)^2 + pi z^2 / 2}``:
for fixed z it is a Gaussian bump centered at Re z, so a trapezoid rule on
Re z +- BARGMANN_HALF_WIDTH converges spectrally for smooth f.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd

from .config import (
    BARGMANN_HALF_WIDTH,
    BARGMANN_MAX_RADIUS,
    BARGMANN_STEP,
    FOCK_COLS,
    FOCK_RADIUS,
    FOCK_STEP,
    FOCK_VALIDITY_MARGIN,
    HUDSON_FLOOR,
)
from .core import FiniteSignal, TFPoint, TimeGrid, sample
from .errors import ValidationError, require
from .tfr import wigner
from .windows import Hermite, window_from_descriptor

logger = logging.getLogger(__name__)

_CHUNK = 4096


class BargmannValue(NamedTuple):
    value: complex
    error: float


def _kernel(t: np.ndarray, z: np.ndarray) -> np.ndarray:
    return 2 ** 0.25 * np.exp(-np.pi * (t - z) ** 2 + 0.5 * np.pi * z * z)


def _check_radius(z: np.ndarray) -> None:
    if z.size and float(np.max(np.abs(z))) > BARGMANN_MAX_RADIUS:
        raise ValidationError("bargmann.radius", "quadrature truncation invalid")


def _transform(f, z: np.ndarray, step: float) -> np.ndarray:
    out = np.empty(z.shape, dtype=complex)
    flat_z, flat_out = z.ravel(), out.reshape(-1)
    if isinstance(f, FiniteSignal):
        # the grid itself is the quadrature; step is a multiple of dt
        stride = max(1, int(round(step / f.dt)))
        t = f.grid.times[::stride]
        v = f.values[::stride]
        for lo in range(0, flat_z.size, _CHUNK):
            zz = flat_z[lo:lo + _CHUNK, None]
            flat_out[lo:lo + _CHUNK] = stride * f.dt * (_kernel(t[None, :], zz) @ v)
        return out
    u = np.arange(-BARGMANN_HALF_WIDTH, BARGMANN_HALF_WIDTH + step / 2, step)
    for lo in range(0, flat_z.size, _CHUNK):
        zz = flat_z[lo:lo + _CHUNK, None]
        t = zz.real + u[None, :]
        flat_out[lo:lo + _CHUNK] = step * np.sum(f(t) * _kernel(t, zz), axis=1)
    return out


def _prepare(f):
    return f if isinstance(f, FiniteSignal) else window_from_descriptor(f)


def bargmann(f, z):
    """Bf(z) = 2^{1/4} int f(t) e^{2 pi t z - pi t^2 - pi z^2 / 2} dt for scalar or array z."""
    f = _prepare(f)
    zs = np.asarray(z, dtype=complex)
    _check_radius(zs)
    step = f.dt if isinstance(f, FiniteSignal) else BARGMANN_STEP
    out = _transform(f, zs, step)
    return complex(out) if np.ndim(z) == 0 else out


def bargmann_estimate(f, z: complex) -> BargmannValue:
    """Value and the change when the quadrature step is doubled."""
    f = _prepare(f)
    zs = np.asarray([z], dtype=complex)
    _check_radius(zs)
    step = f.dt if isinstance(f, FiniteSignal) else BARGMANN_STEP
    fine = complex(_transform(f, zs, step)[0])
    coarse = complex(_transform(f, zs, 2 * step)[0])
    return BargmannValue(fine, abs(fine - coarse))


# ---------------- Fock space ----------------

@dataclass(frozen=True)
class FockGrid:
    """Disc |z| <= radius on the square lattice of the given step; weight step^2 e^{-pi |z|^2} inside, 0 outside."""

    radius: float = FOCK_RADIUS
    step: float = FOCK_STEP

    def __post_init__(self):
        require(self.radius > 0 and self.step > 0, "bargmann.bad_grid", "Fock grid radius and step must be > 0")
        require(self.radius <= BARGMANN_MAX_RADIUS, "bargmann.radius", "quadrature truncation invalid")

    @property
    def axis(self) -> np.ndarray:
        n = int(round(self.radius / self.step))
        return self.step * np.arange(-n, n + 1)

    @property
    def points(self) -> np.ndarray:
        x = self.axis
        return x[None, :] + 1j * x[:, None]

    @property
    def inside(self) -> np.ndarray:
        return np.abs(self.points) <= self.radius * (1 + 1e-12)

    @property
    def weights(self) -> np.ndarray:
        z = self.points
        return np.where(self.inside, self.step ** 2 * np.exp(-np.pi * np.abs(z) ** 2), 0.0)

    @property
    def validity_radius(self) -> float:
        return self.radius - FOCK_VALIDITY_MARGIN


@dataclass(frozen=True)
class FockSample:
    z: complex
    value: complex
    weight: float


@dataclass(frozen=True)
class FockSamples:
    grid: FockGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        require(v.shape == self.grid.points.shape, "bargmann.grid_mismatch",
                f"values of shape {v.shape} do not match the Fock grid {self.grid.points.shape}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __iter__(self):
        inside = self.grid.inside
        pts = self.grid.points[inside]
        for z, v, w in zip(pts, self.values[inside], np.exp(-np.pi * np.abs(pts) ** 2)):
            yield FockSample(complex(z), complex(v), float(w))

    def to_frame(self) -> pd.DataFrame:
        inside = self.grid.inside
        z = self.grid.points[inside]
        v = self.values[inside]
        return pd.DataFrame({"re_z": z.real, "im_z": z.imag, "re_B": v.real, "im_B": v.imag}, columns=FOCK_COLS)

    def growth_excess(self, norm: float) -> float:
        """max |F(z)| e^{-pi |z|^2 / 2} - norm; non-positive for F in the Fock space with that norm."""
        inside = self.grid.inside
        env = np.abs(self.values[inside]) * np.exp(-0.5 * np.pi * np.abs(self.grid.points[inside]) ** 2)
        return float(env.max() - norm)


def fock_samples(f, grid: FockGrid | None = None) -> FockSamples:
    grid = FockGrid() if grid is None else grid
    return FockSamples(grid, bargmann(f, grid.points))


def fock_function(F, grid: FockGrid | None = None) -> FockSamples:
    """Samples of an entire function given as a vectorized callable."""
    grid = FockGrid() if grid is None else grid
    return FockSamples(grid, F(grid.points))


def monomial(n: int, z):
    """e_n(z) = (pi^n / n!)^{1/2} z^n."""
    require(int(n) == n and n >= 0, "bargmann.bad_order", f"monomial order must be a non-negative integer, got {n}")
    n = int(n)
    coef = math.exp(0.5 * (n * math.log(math.pi) - math.lgamma(n + 1)))
    return coef * np.asarray(z, dtype=complex) ** n


def fock_monomial(n: int, grid: FockGrid | None = None) -> FockSamples:
    return fock_function(lambda z: monomial(n, z), grid)


def fock_inner(F: FockSamples, G: FockSamples) -> complex:
    if F.grid != G.grid:
        raise ValidationError("bargmann.grid_mismatch", f"Fock samples live on different grids: {F.grid} vs {G.grid}")
    return complex(np.sum(F.values * np.conj(G.values) * F.grid.weights))


def fock_norm(F: FockSamples) -> float:
    return math.sqrt(max(fock_inner(F, F).real, 0.0))


def reproducing_eval(F: FockSamples, w: complex) -> complex:
    """<F, K_w> with K_w(z) = e^{pi conj(w) z}."""
    if abs(w) > F.grid.validity_radius:
        raise ValidationError("bargmann.outside_validity",
                              f"|w| = {abs(w):.3g} exceeds the validity radius {F.grid.validity_radius:.3g} of the Fock grid")
    z = F.grid.points
    return complex(np.sum(F.values * np.exp(np.pi * w * np.conj(z)) * F.grid.weights))


# ---------------- Hermite functions and positivity ----------------

def hermite(n: int) -> Hermite:
    return Hermite(order=int(n))


def hudson_probe(f, grid: TimeGrid | int = 64) -> tuple[float, TFPoint]:
    """Minimum of the Wigner distribution over the grid and where it is attained.

    Cells whose modulus is below HUDSON_FLOOR times the peak are roundoff and
    are left out of the minimum.
    """
    grid = TimeGrid.centered(grid) if isinstance(grid, int) else grid
    g = f if isinstance(f, FiniteSignal) else sample(f, grid)
    W = wigner(g, g)
    values = W.values.real
    peak = float(np.max(np.abs(values)))
    require(peak > 0, "bargmann.zero_signal", "Wigner distribution of the zero signal")
    masked = np.where(np.abs(values) > HUDSON_FLOOR * peak, values, np.inf)
    i, j = np.unravel_index(int(np.argmin(masked)), masked.shape)
    logger.debug("hudson probe: min W = %.3e at (%g, %g)", masked[i, j], W.x_grid[i], W.omega_grid[j])
    return float(masked[i, j]), TFPoint(float(W.x_grid[i]), float(W.omega_grid[j]))
