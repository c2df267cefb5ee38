"""Sampling series for band-limited signals and Poisson summation checks.

Every reconstructor returns a ``SeriesResult``: the truncated series value and
an estimate of what the omitted terms could contribute. For the sinc series
that estimate only decays like 1/K; the raised-cosine window decays like K^-3.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
import pandas as pd

from .config import GRID_ALIGNMENT_TOLERANCE, S0_FLAT_HALF_WIDTH, S0_SUPPORT_HALF_WIDTH
from .core import SeriesResult, series_tail_bound
from .errors import ValidationError, require
from .tfr import oscillatory_quad, stft_at
from .windows import AnalyticWindow, RaisedCosine, window_from_descriptor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SampleSet:
    """values[i] = f(T (k_min + i)); ``band`` is the declared bandwidth B (spectrum in [-B/2, B/2])."""

    values: np.ndarray
    T: float
    k_min: int = 0
    band: float | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=complex).ravel()
        require(v.size > 0, "sampling.empty", "sample set is empty")
        require(math.isfinite(self.T) and self.T > 0, "sampling.bad_period", f"sampling period must be > 0, got {self.T}")
        require(self.band is None or self.band > 0, "sampling.bad_band", f"bandwidth must be > 0, got {self.band}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "k_min", int(self.k_min))

    @classmethod
    def from_function(cls, f, T: float, K: int, band: float | None = None) -> SampleSet:
        """Samples f(T k) for |k| <= K; ``f`` is a callable or a window descriptor."""
        if isinstance(f, (str, dict)):
            f = window_from_descriptor(f)
        k = np.arange(-K, K + 1)
        return cls(np.asarray(f(T * k), dtype=complex), T, -K, band)

    @property
    def k_max(self) -> int:
        return self.k_min + self.values.size - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def times(self) -> np.ndarray:
        return self.T * self.indices


def drop_sample(s: SampleSet, k: int) -> SampleSet:
    """Copy of ``s`` with sample k set to zero."""
    require(s.k_min <= k <= s.k_max, "sampling.bad_index", f"sample {k} is outside [{s.k_min}, {s.k_max}]")
    values = s.values.copy()
    values[k - s.k_min] = 0
    return replace(s, values=values)


def _edge_distance(s: SampleSet, t: float) -> float:
    u = t / s.T
    return min(s.k_max - u, u - s.k_min)


def _sinc_tail(s: SampleSet, t: float) -> float:
    """Samples bounded by the largest observed one, kernel bounded by 1/(pi |u|)."""
    d = _edge_distance(s, t)
    if d <= 0:
        return math.inf
    return 2 * float(np.max(np.abs(s.values))) / (math.pi * d)


def _check_rate(s: SampleSet, bandwidth: float | None) -> float:
    B = s.band if bandwidth is None else bandwidth
    B = 1 / s.T if B is None else B
    require(B > 0, "sampling.bad_band", f"bandwidth must be > 0, got {B}")
    if s.T * B > 1 + GRID_ALIGNMENT_TOLERANCE:
        raise ValidationError("sampling.undersampled", "undersampled: no guaranteed reconstruction")
    return B


# ---------------- Sinc series ----------------

def wkns_reconstruct(s: SampleSet, t: float, bandwidth: float | None = None) -> SeriesResult:
    """sum_k f(T k) sinc((t - T k)/T)."""
    _check_rate(s, bandwidth)
    value = complex(np.sum(s.values * np.sinc((t - s.times) / s.T)))
    return SeriesResult(value, _sinc_tail(s, t))


def bandpass_reconstruct(s: SampleSet, carrier: float, t: float, bandwidth: float | None = None) -> SeriesResult:
    """sum_k f(T k) sinc((t - T k)/T) e^{2 pi i carrier (t - T k)}; ``bandwidth`` is the baseband width."""
    _check_rate(s, bandwidth)
    d = t - s.times
    value = complex(np.sum(s.values * np.sinc(d / s.T) * np.exp(2j * np.pi * carrier * d)))
    return SeriesResult(value, _sinc_tail(s, t))


def multiband_reconstruct(bands, t: float) -> SeriesResult:
    """Sum of bandpass reconstructions over ``[(carrier, SampleSet), ...]``."""
    bands = list(bands)
    if not bands:
        raise ValidationError("sampling.no_bands", "multiband reconstruction needs at least one band")
    parts = [bandpass_reconstruct(s, carrier, t) for carrier, s in bands]
    return SeriesResult(sum(p.value for p in parts), sum(p.tail_bound for p in parts))


def multiband_coefficients(f, k: float, l: float) -> complex:
    """V_sinc f(k, l) = int_{l-1/2}^{l+1/2} f_hat(omega) e^{2 pi i (omega - l) k} d omega."""
    f = window_from_descriptor(f)
    # the integrand is f_hat(l + u) e^{2 pi i u k}: a transform at -k over u in [-1/2, 1/2]
    return oscillatory_quad(lambda u: complex(f.fourier(l + u)), -0.5, 0.5, -k)


def band_samples(f, l: int, K: int) -> SampleSet:
    """Samples of the unit-width band component of f around integer carrier l, |k| <= K."""
    k = np.arange(-K, K + 1)
    coeffs = np.array([multiband_coefficients(f, kk, l) for kk in k])
    return SampleSet(coeffs * np.exp(2j * np.pi * l * k), 1.0, -K, 1.0)


def multiband_samples(f, carriers, K: int) -> list[tuple[int, SampleSet]]:
    return [(int(l), band_samples(f, int(l), K)) for l in carriers]


def sinc_window_stft(f, k: float, l: float) -> complex:
    """The same coefficient by time-domain quadrature, for cross-checking."""
    return stft_at(f, "sinc", k, l)


# ---------------- Raised-cosine window ----------------

def _check_flat(g: AnalyticWindow, half_band: float) -> None:
    flat = getattr(g, "flat_band", None)
    if flat is None:
        probe = np.linspace(-half_band, half_band, 257)
        outside = np.linspace(S0_SUPPORT_HALF_WIDTH, 4 * S0_SUPPORT_HALF_WIDTH, 257)
        ok = np.allclose(g.fourier(probe), 1.0, atol=1e-12) and np.allclose(g.fourier(outside), 0.0, atol=1e-12)
        flat = half_band if ok else -1.0
    if half_band > flat + GRID_ALIGNMENT_TOLERANCE:
        raise ValidationError("sampling.band_exceeds_window", "band of f exceeds the flat region of the window")


def s0_window_reconstruct(s: SampleSet, g=None, t: float = 0.0, bandwidth: float | None = None) -> SeriesResult:
    """sum_k f(T k) g((t - T k)/T) for a window with flat spectrum on the (rescaled) band of f."""
    g = RaisedCosine() if g is None else window_from_descriptor(g)
    B = s.band if bandwidth is None else bandwidth
    require(B is not None and B > 0, "sampling.bad_band", "raised-cosine reconstruction needs a declared bandwidth")
    _check_flat(g, 0.5 * B * s.T)
    u = (t - s.times) / s.T
    value = complex(np.sum(s.values * g(u)))
    d = _edge_distance(s, t)
    if d <= 0 or g.majorant(0.0) is None:
        tail = math.inf
    else:
        tail = 2 * float(np.max(np.abs(s.values))) * (float(g.majorant(d)) + g.majorant_integral(d))
    return SeriesResult(value, tail)


def truncation_table(f, Ks, ts, T: float = 1.0, band: float = 0.5) -> pd.DataFrame:
    """Max error over ``ts`` of the sinc and raised-cosine series truncated at |k| <= K."""
    if isinstance(f, (str, dict)):
        f = window_from_descriptor(f)
    ts = np.asarray(ts, dtype=float)
    exact = np.asarray(f(ts), dtype=complex)
    rows = []
    for K in Ks:
        s = SampleSet.from_function(f, T, int(K), band)
        sinc_vals = np.array([wkns_reconstruct(s, t).value for t in ts])
        s0_vals = np.array([s0_window_reconstruct(s, None, t).value for t in ts])
        rows.append({
            "K": int(K),
            "sinc_error": float(np.max(np.abs(sinc_vals - exact))),
            "s0_error": float(np.max(np.abs(s0_vals - exact))),
        })
    table = pd.DataFrame(rows, columns=["K", "sinc_error", "s0_error"])
    logger.debug("truncation table:\n%s", table.to_string(index=False))
    return table


def compare_truncation(Ks=(10, 20, 40, 80), ts=None) -> pd.DataFrame:
    """Truncation errors for sinc^2(t/4), whose band [-1/4, 1/4] fits the raised-cosine flat region."""
    ts = np.linspace(-3.0, 3.0, 25) if ts is None else ts
    return truncation_table(lambda t: np.sinc(np.asarray(t) / 4) ** 2, Ks, ts, T=1.0, band=2 * S0_FLAT_HALF_WIDTH)


# ---------------- Poisson summation ----------------

class PoissonCheck(NamedTuple):
    lhs: complex
    rhs: complex
    difference: float
    tail_bound: float


def poisson_check(f, t: float, K: int, alpha: float = 1.0) -> PoissonCheck:
    """sum_k f(t + alpha k) against alpha^{-1} sum_k f_hat(k/alpha) e^{2 pi i k t/alpha}, both truncated at |k| <= K."""
    f = window_from_descriptor(f)
    require(alpha > 0, "sampling.bad_period", f"period must be > 0, got {alpha}")
    require(K >= 0, "sampling.bad_truncation", f"truncation must be >= 0, got {K}")
    if not f.has_fourier:
        raise ValidationError("sampling.no_closed_form_ft", f"window {f.kind!r} has no closed-form Fourier transform")
    if f.majorant(0.0) is None or f.fourier_majorant(0.0) is None:
        raise ValidationError("sampling.decay_hypothesis",
                              f"window {f.kind!r} fails the decay hypothesis: both sums must converge absolutely")
    k = np.arange(-K, K + 1)
    lhs = complex(np.sum(f(t + alpha * k)))
    rhs = complex(np.sum(f.fourier(k / alpha) * np.exp(2j * np.pi * k * t / alpha)) / alpha)
    tail = series_tail_bound(f, alpha, abs(t), K) + series_tail_bound(f, 1 / alpha, 0.0, K, fourier_side=True) / alpha
    logger.debug("poisson %s at t=%g: |lhs-rhs|=%.3e, tails %.3e", f.kind, t, abs(lhs - rhs), tail)
    return PoissonCheck(lhs, rhs, abs(lhs - rhs), tail)
