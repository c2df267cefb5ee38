"""Closed-form windows.

Every window evaluates exactly at arbitrary real points and, where a closed form
exists, knows its Fourier transform (convention ``F f(w) = int f(t) e^{-2 pi i w t} dt``).
Decay majorants drive the tail bounds used by periodization, Poisson checks and
Zak series; a window whose time or frequency side is not absolutely summable
reports ``None`` for that majorant.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, fields
from typing import ClassVar

import numpy as np
from scipy import integrate, optimize, special

from .config import HERMITE_MAX_ORDER, SUPPORT_CUTOFF
from .errors import ValidationError, require

logger = logging.getLogger(__name__)

# Cramer's bound on L2-normalized Hermite functions of the physicists' variable.
_CRAMER = 1.086435


def _parse_complex(value, name: str) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    try:
        return complex(str(value).replace(" ", "").replace("i", "j")) if isinstance(value, str) else complex(value)
    except (TypeError, ValueError):
        raise ValidationError("windows.bad_param", f"parameter {name!r} is not a complex number: {value!r}") from None


def _json_number(z: complex):
    return z.real if z.imag == 0 else [z.real, z.imag]


@dataclass(frozen=True)
class AnalyticWindow:
    """Base class. Subclasses set ``kind`` and implement ``__call__`` and ``majorant``."""

    kind: ClassVar[str] = ""
    breakpoints: ClassVar[tuple[float, ...]] = ()

    def __call__(self, t) -> np.ndarray:
        raise NotImplementedError

    def fourier(self, omega) -> np.ndarray:
        raise ValidationError("windows.no_closed_form_ft", f"window {self.kind!r} has no closed-form Fourier transform")

    def majorant(self, r) -> np.ndarray | None:
        """Non-increasing bound on |f(t)| valid for |t| >= r, or None if f is not absolutely summable."""
        return None

    def fourier_majorant(self, r) -> np.ndarray | None:
        return None

    @property
    def has_fourier(self) -> bool:
        try:
            self.fourier(0.0)
        except ValidationError:
            return False
        return True

    def support(self, cutoff: float = SUPPORT_CUTOFF) -> tuple[float, float]:
        """Interval outside which |f| stays below ``cutoff``."""
        if self.majorant(0.0) is None:
            return (-math.inf, math.inf)
        m = lambda r: float(self.majorant(r)) - cutoff
        hi = 1.0
        while m(hi) > 0:
            hi *= 2.0
            if hi > 1e8:
                return (-math.inf, math.inf)
        lo = 0.0 if m(0.0) > 0 else None
        if lo is None:
            return (0.0, 0.0)
        r = optimize.brentq(m, lo, hi, xtol=1e-12)
        return (-r, r)

    def majorant_integral(self, r0: float, fourier_side: bool = False) -> float:
        m = self.fourier_majorant if fourier_side else self.majorant
        value, _ = integrate.quad(lambda r: float(m(r)), max(r0, 0.0), np.inf, limit=200)
        return value

    def params(self) -> dict:
        return {f.name: _json_number(getattr(self, f.name)) if isinstance(getattr(self, f.name), complex)
                else getattr(self, f.name) for f in fields(self)}

    def descriptor(self) -> dict:
        return {"kind": self.kind, "params": self.params()}

    def norm(self) -> float:
        lo, hi = self.support()
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValidationError("windows.unbounded_support", f"window {self.kind!r} has no effective support")
        pts = [p for p in self.breakpoints if lo < p < hi]
        val, _ = integrate.quad(lambda t: abs(complex(self(t))) ** 2, lo, hi, points=pts or None, limit=400)
        return math.sqrt(val)


# ---------------- Gaussians ----------------

@dataclass(frozen=True)
class Gaussian(AnalyticWindow):
    """(2s)^{1/4} e^{-pi s t^2}; unit L2 norm, scale 1 is the standard Gaussian."""

    scale: float = 1.0
    kind: ClassVar[str] = "gaussian"

    def __post_init__(self):
        require(self.scale > 0, "windows.bad_param", f"gaussian scale must be > 0, got {self.scale}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return ((2 * self.scale) ** 0.25 * np.exp(-np.pi * self.scale * t * t)).astype(complex)

    def fourier(self, omega):
        w = np.asarray(omega, dtype=float)
        return ((2 / self.scale) ** 0.25 * np.exp(-np.pi * w * w / self.scale)).astype(complex)

    def majorant(self, r):
        r = np.maximum(np.asarray(r, dtype=float), 0.0)
        return (2 * self.scale) ** 0.25 * np.exp(-np.pi * self.scale * r * r)

    def fourier_majorant(self, r):
        r = np.maximum(np.asarray(r, dtype=float), 0.0)
        return (2 / self.scale) ** 0.25 * np.exp(-np.pi * r * r / self.scale)


def _shifted_gaussian_bound(peak_log: float, rate: float, center: float, r):
    d = np.maximum(np.abs(np.asarray(r, dtype=float)) - abs(center), 0.0)
    return np.exp(peak_log - np.pi * rate * np.square(d))


@dataclass(frozen=True)
class GeneralizedGaussian(AnalyticWindow):
    """e^{-pi A t^2 + 2 pi b t + c} with Re A > 0."""

    A: complex = 1.0
    b: complex = 0.0
    c: complex = 0.0
    kind: ClassVar[str] = "generalized_gaussian"

    def __post_init__(self):
        for name in ("A", "b", "c"):
            object.__setattr__(self, name, _parse_complex(getattr(self, name), name))
        require(self.A.real > 0, "windows.bad_param", f"generalized gaussian needs Re A > 0, got A = {self.A}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-np.pi * self.A * t * t + 2 * np.pi * self.b * t + self.c)

    def fourier(self, omega):
        w = np.asarray(omega, dtype=float)
        return np.exp(self.c) / np.sqrt(self.A) * np.exp(np.pi * (self.b - 1j * w) ** 2 / self.A)

    def majorant(self, r):
        rate = self.A.real
        center = self.b.real / rate
        peak_log = self.c.real + np.pi * self.b.real ** 2 / rate
        return _shifted_gaussian_bound(peak_log, rate, center, r)

    def fourier_majorant(self, r):
        inv = 1 / self.A
        rate = inv.real
        slope = 2 * (self.b * inv).imag
        const = (self.b * self.b * inv).real
        center = slope / (2 * rate)
        peak_log = self.c.real - 0.5 * math.log(abs(self.A)) + np.pi * (const + slope * slope / (4 * rate))
        return _shifted_gaussian_bound(peak_log, rate, center, r)


# ---------------- Box and sinc ----------------

@dataclass(frozen=True)
class Box(AnalyticWindow):
    """Indicator of [-1/2, 1/2], value 1/2 at the jumps."""

    kind: ClassVar[str] = "box"
    breakpoints: ClassVar[tuple[float, ...]] = (-0.5, 0.5)

    def __call__(self, t):
        a = np.abs(np.asarray(t, dtype=float))
        return np.where(a < 0.5, 1.0, np.where(a == 0.5, 0.5, 0.0)).astype(complex)

    def fourier(self, omega):
        return np.sinc(np.asarray(omega, dtype=float)).astype(complex)

    def majorant(self, r):
        return np.where(np.asarray(r, dtype=float) <= 0.5, 1.0, 0.0)

    def support(self, cutoff: float = SUPPORT_CUTOFF):
        return (-0.5, 0.5)


@dataclass(frozen=True)
class Sinc(AnalyticWindow):
    kind: ClassVar[str] = "sinc"

    def __call__(self, t):
        return np.sinc(np.asarray(t, dtype=float)).astype(complex)

    def fourier(self, omega):
        return Box()(omega)

    def fourier_majorant(self, r):
        return np.where(np.asarray(r, dtype=float) <= 0.5, 1.0, 0.0)


# ---------------- Exponentials ----------------

@dataclass(frozen=True)
class OneSidedExp(AnalyticWindow):
    """e^{-pi a t} for t > 0, 1/2 at t = 0, zero for t < 0."""

    decay: float = 1.0
    kind: ClassVar[str] = "onesided_exp"
    breakpoints: ClassVar[tuple[float, ...]] = (0.0,)

    def __post_init__(self):
        require(self.decay > 0, "windows.bad_param", f"decay must be > 0, got {self.decay}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        pos = np.exp(-np.pi * self.decay * np.maximum(t, 0.0))
        return np.where(t > 0, pos, np.where(t == 0, 0.5, 0.0)).astype(complex)

    def fourier(self, omega):
        w = np.asarray(omega, dtype=float)
        return 1 / (np.pi * (self.decay + 2j * w))

    def majorant(self, r):
        return np.exp(-np.pi * self.decay * np.maximum(np.asarray(r, dtype=float), 0.0))

    def support(self, cutoff: float = SUPPORT_CUTOFF):
        return (0.0, -math.log(cutoff) / (np.pi * self.decay))


@dataclass(frozen=True)
class TwoSidedExp(AnalyticWindow):
    """e^{-a |t|}."""

    decay: float = 1.0
    kind: ClassVar[str] = "twosided_exp"
    breakpoints: ClassVar[tuple[float, ...]] = (0.0,)

    def __post_init__(self):
        require(self.decay > 0, "windows.bad_param", f"decay must be > 0, got {self.decay}")

    def __call__(self, t):
        return np.exp(-self.decay * np.abs(np.asarray(t, dtype=float))).astype(complex)

    def fourier(self, omega):
        w = np.asarray(omega, dtype=float)
        a = self.decay
        return (2 * a / (a * a + 4 * np.pi ** 2 * w * w)).astype(complex)

    def majorant(self, r):
        return np.exp(-self.decay * np.maximum(np.asarray(r, dtype=float), 0.0))

    def fourier_majorant(self, r):
        w = np.maximum(np.asarray(r, dtype=float), 0.0)
        a = self.decay
        return 2 * a / (a * a + 4 * np.pi ** 2 * w * w)


@dataclass(frozen=True)
class Sech(AnalyticWindow):
    """1 / cosh(pi t), its own Fourier transform."""

    kind: ClassVar[str] = "sech"

    def __call__(self, t):
        return (1 / np.cosh(np.pi * np.asarray(t, dtype=float))).astype(complex)

    def fourier(self, omega):
        return self(omega)

    def majorant(self, r):
        return np.minimum(1.0, 2 * np.exp(-np.pi * np.maximum(np.asarray(r, dtype=float), 0.0)))

    fourier_majorant = majorant


# ---------------- Hermite functions ----------------

def _hermite_table(n: int, u: np.ndarray) -> np.ndarray:
    """psi_0..psi_n at u (physicists' variable, unit L2 norm) by the three-term recursion."""
    psi = np.zeros((n + 1,) + u.shape)
    psi[0] = np.pi ** -0.25 * np.exp(-0.5 * u * u)
    if n >= 1:
        psi[1] = math.sqrt(2.0) * u * psi[0]
    for k in range(1, n):
        psi[k + 1] = math.sqrt(2.0 / (k + 1)) * u * psi[k] - math.sqrt(k / (k + 1)) * psi[k - 1]
    return psi


@dataclass(frozen=True)
class Hermite(AnalyticWindow):
    """h_n(t) = (2 pi)^{1/4} psi_n(sqrt(2 pi) t); h_0 is the standard Gaussian."""

    order: int = 0
    kind: ClassVar[str] = "hermite"

    def __post_init__(self):
        require(isinstance(self.order, (int, np.integer)) and self.order >= 0,
                "windows.bad_param", f"hermite order must be a non-negative integer, got {self.order!r}")
        require(self.order <= HERMITE_MAX_ORDER, "bargmann.hermite_order_cap",
                f"hermite order {self.order} exceeds the recursion cap {HERMITE_MAX_ORDER}")

    def __call__(self, t):
        u = math.sqrt(2 * np.pi) * np.asarray(t, dtype=float)
        return ((2 * np.pi) ** 0.25 * _hermite_table(int(self.order), u)[-1]).astype(complex)

    def fourier(self, omega):
        return (-1j) ** int(self.order) * self(omega)

    def majorant(self, r):
        n = int(self.order)
        scale = (2 * np.pi) ** 0.25
        cramer = scale * _CRAMER * np.pi ** -0.25
        u_r = math.sqrt(2 * np.pi) * np.maximum(np.asarray(r, dtype=float), 0.0)
        u = np.maximum(u_r, max(math.sqrt(n), 1e-300)).ravel()
        # |H_n(u)| <= sum_m n! (2u)^{n-2m} / (m! (n-2m)!), decreasing against e^{-u^2/2} once u >= sqrt(n)
        ms = np.arange(n // 2 + 1)
        log_norm = -0.5 * (n * math.log(2) + math.lgamma(n + 1) + 0.5 * math.log(np.pi))
        log_coef = math.lgamma(n + 1) - special.gammaln(ms + 1) - special.gammaln(n - 2 * ms + 1)
        terms = log_coef[:, None] + np.outer(n - 2 * ms, np.log(2 * u))
        tail = scale * np.exp(log_norm + special.logsumexp(terms, axis=0) - 0.5 * u * u)
        out = np.where(u_r.ravel() >= math.sqrt(n), np.minimum(cramer, tail), cramer)
        return out.reshape(np.shape(u_r)) if np.ndim(u_r) else float(out[0])

    fourier_majorant = majorant


# ---------------- Raised cosine (S0 window) ----------------

@dataclass(frozen=True)
class RaisedCosine(AnalyticWindow):
    """Spectrum 1 on [-1/4, 1/4], cos^2 rolloff to 0 at +-1/2; time decay ~ |t|^{-3}."""

    kind: ClassVar[str] = "raised_cosine"
    flat_band: ClassVar[float] = 0.25

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        denom = 1 - (t / 2) ** 2
        near = np.abs(denom) < 1e-12
        safe = np.where(near, 1.0, denom)
        value = 0.75 * np.sinc(0.75 * t) * np.cos(np.pi * t / 4) / safe
        # removable singularity at t = +-2
        return np.where(near, 3 * np.pi / 16 * np.sinc(1.5), value).astype(complex)

    def fourier(self, omega):
        a = np.abs(np.asarray(omega, dtype=float))
        roll = np.cos(2 * np.pi * (a - 0.25)) ** 2
        return np.where(a <= 0.25, 1.0, np.where(a < 0.5, roll, 0.0)).astype(complex)

    def majorant(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = 4 / (np.pi * r * (r * r - 4))
        return np.where(r > 2.5, np.minimum(0.75, tail), 0.75)

    def fourier_majorant(self, r):
        return np.where(np.asarray(r, dtype=float) <= 0.5, 1.0, 0.0)


# ---------------- Registry and descriptors ----------------

WINDOW_KINDS: dict[str, type[AnalyticWindow]] = {
    cls.kind: cls
    for cls in (GeneralizedGaussian, Gaussian, Box, Sinc, OneSidedExp, TwoSidedExp, Sech, Hermite, RaisedCosine)
}

WINDOW_KEYWORDS = {
    "generalized_gaussian": ["generalized gaussian", "general gaussian", "chirped gaussian", "gen gauss"],
    "gaussian": ["gaussian", "gauss", "g0", "normal"],
    "box": ["box", "rect", "rectangle", "rectangular", "indicator", "b0"],
    "sinc": ["sinc"],
    "onesided_exp": ["onesided", "one sided", "causal exp", "causal exponential"],
    "twosided_exp": ["twosided", "two sided", "laplace"],
    "sech": ["sech", "hyperbolic secant"],
    "hermite": ["hermite"],
    "raised_cosine": ["raised cosine", "s0"],
}

PARAM_ALIASES = {
    "s": "scale", "sigma": "scale", "a": "decay", "n": "order",
}


def normalize_window_kind(kind: str) -> str:
    """Canonical kind for a name or keyword phrase; phrases match whole words only.

    When several kinds match, the one with the longest matching phrase wins and a
    tie between different kinds is rejected.
    """
    raw = str(kind or "").strip().lower()
    compact = re.sub(r"[^a-z0-9]+", " ", raw).strip()
    if compact.replace(" ", "_") in WINDOW_KINDS:
        return compact.replace(" ", "_")
    tokens = compact.split()
    best: dict[str, int] = {}
    for canonical, keywords in WINDOW_KEYWORDS.items():
        for phrase in keywords:
            words = phrase.split()
            n = len(words)
            if any(tokens[i:i + n] == words for i in range(len(tokens) - n + 1)):
                best[canonical] = max(best.get(canonical, 0), n)
    if not best:
        raise ValidationError("windows.unknown_kind", f"unknown window kind {kind!r}; known: {sorted(WINDOW_KINDS)}")
    top = max(best.values())
    winners = sorted(k for k, n in best.items() if n == top)
    if len(winners) > 1:
        raise ValidationError("windows.ambiguous_kind", f"window kind {kind!r} matches several kinds: {winners}")
    return winners[0]


def window_from_descriptor(desc) -> AnalyticWindow:
    """Build a window from ``"gaussian"``, ``{"kind": ..., "params": {...}}`` or an AnalyticWindow."""
    if isinstance(desc, AnalyticWindow):
        return desc
    if isinstance(desc, str):
        desc = {"kind": desc}
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ValidationError("windows.bad_descriptor", f"window descriptor needs a 'kind': {desc!r}")
    unknown = set(desc) - {"kind", "params"}
    require(not unknown, "windows.bad_descriptor", f"unknown window descriptor keys: {sorted(unknown)}")
    cls = WINDOW_KINDS[normalize_window_kind(desc["kind"])]
    allowed = {f.name for f in fields(cls)}
    params = {}
    for key, value in (desc.get("params") or {}).items():
        name = key if key in allowed else PARAM_ALIASES.get(key, key)
        require(name in allowed, "windows.bad_param", f"window {cls.kind!r} takes no parameter {key!r}")
        params[name] = value
    if "order" in params:
        params["order"] = int(params["order"])
    for name in ("scale", "decay"):
        if name in params:
            params[name] = float(params[name])
    return cls(**params)
