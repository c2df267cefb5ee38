import math

import numpy as np
import pytest

from tfrlab.core import FiniteSignal, TFPoint, TimeGrid, random_signal, sample, tf_shift
from tfrlab.diagnostics import (
    amalgam_norm,
    disc_region,
    donoho_stark_check,
    hilbert_schmidt_norm,
    hpw_product,
    interval_set,
    lieb_check,
    lieb_direction_holds,
    weak_up_stft,
)
from tfrlab.errors import ValidationError
from tfrlab.tfr import stft
from tfrlab.windows import Hermite, Sech, TwoSidedExp


# ---------------- Heisenberg ----------------

def test_gaussian_meets_heisenberg_equality(g0_256):
    product, bound = hpw_product(g0_256)
    assert bound == pytest.approx(1 / (4 * math.pi), rel=1e-12)
    assert product == pytest.approx(bound, rel=1e-8)


def test_shifted_gaussian_with_matching_centers(g0_256):
    shifted = tf_shift(g0_256, TFPoint(0.5, 0.75))
    product, bound = hpw_product(shifted, 0.5, 0.75)
    assert product == pytest.approx(bound, rel=1e-8)
    off, _ = hpw_product(shifted)
    assert off > 2 * bound


def test_first_hermite_function_triples_the_product(grid256):
    product, bound = hpw_product(sample(Hermite(1), grid256))
    assert product / bound == pytest.approx(3.0, rel=1e-6)
    assert product >= 2 * bound


def test_zero_signal_is_refused(g0_64):
    with pytest.raises(ValidationError) as err:
        hpw_product(g0_64.scaled(0))
    assert err.value.code == "diagnostics.zero_signal"


# ---------------- Concentration ----------------

def test_donoho_stark_on_random_sets(rng, grid64):
    for _ in range(30):
        f = random_signal(grid64, rng)
        T = rng.random(64) < rng.uniform(0.1, 0.9)
        W = rng.random(64) < rng.uniform(0.1, 0.9)
        eps_t, eps_w, slack = donoho_stark_check(f, T, W)
        assert 0 <= eps_t <= 1 + 1e-12 and 0 <= eps_w <= 1 + 1e-12
        if eps_t + eps_w <= 1:
            assert slack >= -1e-8


def test_donoho_stark_on_concentrated_gaussian(g0_256):
    T = interval_set(g0_256.grid, -1.0, 1.0)
    W = interval_set(g0_256.grid.frequency_grid(), -1.0, 1.0)
    eps_t, eps_w, slack = donoho_stark_check(g0_256, T, W)
    assert eps_t < 0.05 and eps_w < 0.05
    assert slack >= 0


def test_hilbert_schmidt_norm_is_square_root_of_measure(rng, grid64):
    T = np.flatnonzero(rng.random(64) < 0.3)
    W = np.flatnonzero(rng.random(64) < 0.5)
    expected = math.sqrt(T.size * grid64.step * W.size * grid64.freq_step)
    assert hilbert_schmidt_norm(T, W, grid64) == pytest.approx(expected, rel=1e-12)
    assert hilbert_schmidt_norm([], W, grid64) == 0.0


def test_sets_must_fit_the_grid(g0_64):
    with pytest.raises(ValidationError) as err:
        donoho_stark_check(g0_64, [0, 64], [1])
    assert err.value.code == "diagnostics.bad_set"


# ---------------- Weak uncertainty on the STFT ----------------

def test_weak_uncertainty_on_a_disc(g0_256):
    V = stft(g0_256, g0_256)
    U = disc_region(V, 1.0)
    mass, area = weak_up_stft(g0_256, g0_256, U)
    assert mass <= area
    assert mass == pytest.approx(1 - math.exp(-math.pi), abs=0.05)


def test_full_grid_carries_all_mass(g0_64, rng):
    f = random_signal(g0_64.grid, rng)
    V = stft(f, g0_64)
    mass, area = weak_up_stft(f, g0_64, np.ones(V.shape, dtype=bool))
    assert mass == pytest.approx(1.0, abs=1e-12)
    assert area == pytest.approx(64 * V.cell_area)


def test_single_cell_mass_is_below_its_area(g0_64):
    V = stft(g0_64, g0_64)
    U = np.zeros(V.shape, dtype=bool)
    U[V.index(0.0, 0.0)] = True
    mass, area = weak_up_stft(g0_64, g0_64, U)
    assert mass <= area * (1 + 1e-12)


def test_weak_uncertainty_needs_unit_norms(g0_64):
    with pytest.raises(ValidationError) as err:
        weak_up_stft(g0_64.scaled(2.0), g0_64, np.ones((64, 64), dtype=bool))
    assert err.value.code == "diagnostics.unnormalized"


# ---------------- Lieb ----------------

def test_lieb_equality_at_two(g0_256, rng):
    f = random_signal(g0_256.grid, rng)
    lhs, rhs = lieb_check(f, g0_256, 2)
    assert lhs == pytest.approx(rhs, rel=1e-10)
    assert lieb_direction_holds(lhs, rhs, 2)


@pytest.mark.parametrize("p", [1.0, 4.0])
def test_lieb_direction(grid256, g0_256, p):
    signals = [g0_256] + [sample(Hermite(n), grid256) for n in (1, 2, 3)]
    signals += [sample(Sech(), grid256).normalized(), sample(TwoSidedExp(1.0), grid256).normalized()]
    for f in signals:
        lhs, rhs = lieb_check(f, g0_256, p)
        assert lieb_direction_holds(lhs, rhs, p)


def test_lieb_gaussian_is_extremal(g0_256):
    lhs, rhs = lieb_check(g0_256, g0_256, 4.0)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_lieb_exponent_range(g0_64):
    with pytest.raises(ValidationError):
        lieb_check(g0_64, g0_64, 0.5)


# ---------------- Wiener amalgam ----------------

def test_amalgam_norm():
    grid = TimeGrid.centered(48)
    block = np.zeros(48)
    block[:6] = 1.0
    assert amalgam_norm(FiniteSignal(block, grid), 6) == pytest.approx(1.0)
    assert amalgam_norm(FiniteSignal(np.ones(48), grid), 4) == pytest.approx(12.0)
    with pytest.raises(ValidationError) as err:
        amalgam_norm(FiniteSignal(np.ones(48), grid), 5)
    assert err.value.code == "diagnostics.bad_block"
