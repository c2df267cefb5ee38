"""Built-in oracle comparisons, grouped by module, run by ``--selftest``."""

from __future__ import annotations

import logging
import math

import numpy as np

from . import bargmann, core, diagnostics, gabor, sampling, tfr, zak
from .errors import TfrlabError
from .windows import Box, Gaussian, Hermite

logger = logging.getLogger(__name__)


def _grid(L: int) -> core.TimeGrid:
    return core.TimeGrid.centered(L)


def _g0(L: int) -> core.FiniteSignal:
    return core.sample(Gaussian(), _grid(L))


# ---------------- core ----------------

def _fourier_gaussian() -> bool:
    g = _g0(64)
    return np.max(np.abs(core.fourier(g).values - g.values)) < 1e-10


def _fourier_round_trip() -> bool:
    f = core.random_signal(_grid(60), np.random.default_rng(1))
    return np.max(np.abs(core.inverse_fourier(core.fourier(f)).values - f.values)) < 1e-12


def _commutation() -> bool:
    f = core.random_signal(_grid(64), np.random.default_rng(2))
    x, w = 3 * f.dt, 5 * f.grid.freq_step
    lhs = core.modulate(core.translate(f, x), w)
    rhs = core.translate(core.modulate(f, w), x).scaled(np.exp(2j * np.pi * w * x))
    return np.max(np.abs(lhs.values - rhs.values)) < 1e-12


def _poisson_2d() -> bool:
    return core.symplectic_poisson_check(core.Lattice.separable(0.8, 1.1), [0.3, -0.2])[2] < 1e-12


# ---------------- tfr ----------------

def _gaussian_stft() -> bool:
    g = _g0(256)
    V = tfr.stft(g, g)
    x, w = np.meshgrid(V.x_grid, V.omega_grid, indexing="ij")
    exact = np.exp(-1j * np.pi * x * w) * np.exp(-np.pi * (x * x + w * w) / 2)
    return np.max(np.abs(V.values - exact)) < 1e-6


def _istft_round_trip() -> bool:
    g = _g0(64)
    f = core.random_signal(g.grid, np.random.default_rng(3))
    back = tfr.istft(tfr.stft(f, g), g, g)
    return np.linalg.norm(back.values - f.values) < 1e-8 * np.linalg.norm(f.values)


def _symplectic_involution() -> bool:
    g = _g0(64)
    A = tfr.ambiguity(g, g)
    twice = tfr.symplectic_ft(tfr.symplectic_ft(A))
    return np.max(np.abs(twice.values - A.values)) < 1e-12


# ---------------- gabor ----------------

def _zak_matches_eig() -> bool:
    G = gabor.GaborSystem(_g0(64), 8, 8)
    dense = gabor.frame_bounds(G, "dense_eig")
    z = gabor.frame_bounds(G, "zak")
    return abs(dense.A - z.A) < 1e-8 and abs(dense.B - z.B) < 1e-8


def _wexler_raz() -> bool:
    G = gabor.GaborSystem(_g0(64), 4, 8)
    return gabor.wexler_raz_residual(G.window, gabor.canonical_dual(G), G) < 1e-7


def _odd_window() -> bool:
    G = gabor.GaborSystem(core.sample(Hermite(1), _grid(64)), 4, 8)
    return gabor.frame_bounds(G).A <= 1e-8


# ---------------- zak ----------------

def _zak_round_trip() -> bool:
    f = core.random_signal(_grid(48), np.random.default_rng(4))
    Z = zak.zak_finite(f, 6)
    return np.max(np.abs(zak.zak_inverse(Z).values - f.values)) < 1e-12 and zak.quasiperiodicity_residual(Z) < 1e-10


def _zak_box() -> bool:
    return abs(zak.zak_zero_locate(Box(), 32)[1] - 1.0) < 1e-12


def _zak_gaussian_zero() -> bool:
    point, value = zak.zak_zero_locate(Gaussian(), 64)
    return abs(point.x - 0.5) <= 1 / 64 and abs(point.omega - 0.5) <= 1 / 64 and value < 1e-2


# ---------------- sampling ----------------

def _poisson_gaussian() -> bool:
    return all(sampling.poisson_check(Gaussian(), t, 8).difference < 1e-12 for t in (0.0, 0.5))


def _nyquist_sinc_squared() -> bool:
    f = lambda t: np.sinc(np.asarray(t)) ** 2
    s = sampling.SampleSet.from_function(f, 0.5, 200)
    ts = np.linspace(-3, 3, 25)
    return max(abs(sampling.wkns_reconstruct(s, t, 2.0).value - f(t)) for t in ts) < 1e-4


# ---------------- bargmann ----------------

def _bargmann_ground_state() -> bool:
    z = np.array([0.3 + 0.2j, -1.0 + 0.5j, 1.5j])
    return np.max(np.abs(bargmann.bargmann(Gaussian(), z) - 1)) < 1e-10


def _fock_isometry() -> bool:
    F = bargmann.fock_samples(Hermite(2))
    return abs(bargmann.fock_norm(F) - 1) < 1e-6


# ---------------- diagnostics ----------------

def _hpw_equality() -> bool:
    prod, bound = diagnostics.hpw_product(_g0(256))
    return abs(prod - bound) < 1e-8


def _lieb_moyal() -> bool:
    g = _g0(64)
    f = core.random_signal(g.grid, np.random.default_rng(5))
    lhs, rhs = diagnostics.lieb_check(f, g, 2)
    return math.isclose(lhs, rhs, rel_tol=1e-10)


CHECKS = {
    "core": [_fourier_gaussian, _fourier_round_trip, _commutation, _poisson_2d],
    "tfr": [_gaussian_stft, _istft_round_trip, _symplectic_involution],
    "gabor": [_zak_matches_eig, _wexler_raz, _odd_window],
    "zak": [_zak_round_trip, _zak_box, _zak_gaussian_zero],
    "sampling": [_poisson_gaussian, _nyquist_sinc_squared],
    "bargmann": [_bargmann_ground_state, _fock_isometry],
    "diagnostics": [_hpw_equality, _lieb_moyal],
}


def run_selftest(modules=None) -> dict:
    """{module: {"passed", "failed", "failures"}} for the requested modules (all by default)."""
    modules = list(CHECKS) if modules is None else list(modules)
    report = {}
    for name in modules:
        passed, failures = 0, []
        for check in CHECKS[name]:
            label = check.__name__.lstrip("_")
            try:
                ok = bool(check())
            except TfrlabError as exc:
                logger.warning("selftest %s.%s raised %s: %s", name, label, exc.code, exc.message)
                ok = False
            if ok:
                passed += 1
            else:
                failures.append(label)
        report[name] = {"passed": passed, "failed": len(failures), "failures": failures}
        logger.info("selftest %s: %d passed, %d failed", name, passed, len(failures))
    return report
