import math

import numpy as np
import pytest

from tfrlab.core import FiniteSignal, TimeGrid, inner, metaplectic_generator, random_signal, sample
from tfrlab.errors import NumericalError, ValidationError
from tfrlab.gabor import (
    FrameReport,
    GaborSystem,
    analysis,
    canonical_dual,
    divisor_pairs,
    divisors,
    figa_check,
    frame_algorithm,
    frame_bounds,
    frame_operator_apply,
    frame_operator_matrix,
    frame_set_scan,
    janssen_lower_bound,
    nested_violations,
    scan_pairs,
    synthesis,
    tight_window,
    tolimieri_orr_bound,
    wexler_raz_residual,
)
from tfrlab.windows import Gaussian, Hermite


@pytest.fixture
def redundant(g0_64):
    return GaborSystem(g0_64, 4, 8)


def test_system_shape(redundant):
    assert redundant.n_time == 16 and redundant.n_freq == 8
    assert redundant.density == pytest.approx(2.0)
    assert redundant.volume == pytest.approx(0.5)
    assert redundant.lattice.density == pytest.approx(2.0)
    assert redundant.adjoint().a == 8 and redundant.adjoint().b == 16


def test_lattice_steps_must_divide_length(g0_64):
    with pytest.raises(ValidationError) as err:
        GaborSystem(g0_64, 5, 8)
    assert err.value.code == "gabor.bad_lattice"


# ---------------- Analysis, synthesis, frame operator ----------------

def test_synthesis_is_adjoint_of_analysis(redundant, rng):
    f = random_signal(redundant.grid, rng)
    c = rng.standard_normal((16, 8)) + 1j * rng.standard_normal((16, 8))
    assert np.vdot(c, analysis(redundant, f)) == pytest.approx(inner(f, synthesis(redundant, c)), abs=1e-12)


def test_frame_operator_matrix_matches_apply(redundant, rng):
    f = random_signal(redundant.grid, rng)
    S = frame_operator_matrix(redundant)
    np.testing.assert_allclose(S @ f.values, frame_operator_apply(redundant, f).values, atol=1e-12)
    np.testing.assert_allclose(S, S.conj().T, atol=1e-14)


# ---------------- Frame bounds ----------------

@pytest.mark.parametrize("L", [64, 144])
def test_zak_bounds_match_dense_eigensolve(L, rng):
    N = math.isqrt(L)
    g0 = sample(Gaussian(), TimeGrid.centered(L))
    for g in (g0, random_signal(g0.grid, rng)):
        G = GaborSystem(g, N, L // N)
        dense = frame_bounds(G, "dense_eig")
        zak = frame_bounds(G, "zak")
        assert zak.method == "zak"
        assert abs(dense.A - zak.A) <= 1e-8
        assert abs(dense.B - zak.B) <= 1e-8


def test_zak_bounds_need_critical_lattice(redundant):
    with pytest.raises(ValidationError) as err:
        frame_bounds(redundant, "zak")
    assert err.value.code == "gabor.zak_needs_critical"


def test_iterative_bounds_match_dense(redundant):
    dense = frame_bounds(redundant, "dense_eig")
    it = frame_bounds(redundant, "iterative")
    assert it.A == pytest.approx(dense.A, rel=1e-6)
    assert it.B == pytest.approx(dense.B, rel=1e-6)
    assert frame_bounds(redundant, "auto").method == "dense_eig"


def test_unknown_method(redundant):
    with pytest.raises(ValidationError):
        frame_bounds(redundant, "power")


def test_report_marks_non_frames():
    report = FrameReport.from_bounds(1e-20, 2.0, "dense_eig")
    assert not report.is_frame
    assert report.condition == math.inf
    assert FrameReport.from_bounds(0.5, 2.0, "dense_eig").condition == pytest.approx(4.0)


def test_odd_window_fails_at_density_two(grid64):
    G = GaborSystem(sample(Hermite(1), grid64), 4, 8)
    assert frame_bounds(G).A <= 1e-8
    assert janssen_lower_bound(G) <= 1e-8


def test_janssen_symbol_gives_lower_bound(redundant):
    assert janssen_lower_bound(redundant) == pytest.approx(frame_bounds(redundant).A, abs=1e-8)


def test_janssen_needs_even_density(g0_64):
    with pytest.raises(ValidationError) as err:
        janssen_lower_bound(GaborSystem(g0_64, 8, 8))
    assert err.value.message.startswith("hypothesis of the cited result not met")


def test_sheared_system_matches_chirped_window(g0_64):
    chirped = metaplectic_generator("chirp", g0_64, 1.0)
    straight = frame_bounds(GaborSystem(g0_64, 4, 8))
    sheared = frame_bounds(GaborSystem(chirped, 4, 8, shear=1))
    assert sheared.A == pytest.approx(straight.A, abs=1e-10)
    assert sheared.B == pytest.approx(straight.B, abs=1e-10)


def test_tolimieri_orr_sandwich(rng):
    grid = TimeGrid.centered(48)
    steps = divisors(48)
    for _ in range(20):
        g = random_signal(grid, rng)
        G = GaborSystem(g, int(rng.choice(steps)), int(rng.choice(steps)))
        lower, upper = tolimieri_orr_bound(G)
        B = frame_bounds(G).B
        assert lower <= B * (1 + 1e-10)
        assert B <= upper * (1 + 1e-10)


def test_frame_bounds_invariant_under_fourier(grid64, rng):
    for g in (sample(Hermite(2), grid64), random_signal(grid64, rng)):
        report = frame_bounds(GaborSystem(g, 4, 8))
        # J-hat turns the lattice 4Z x 8Z into 8Z x 4Z
        rotated = frame_bounds(GaborSystem(metaplectic_generator("fourier_J", g), 8, 4))
        assert rotated.A == pytest.approx(report.A, rel=1e-9, abs=1e-12)
        assert rotated.B == pytest.approx(report.B, rel=1e-9)


def test_frame_operator_is_positive_semidefinite(rng):
    grid = TimeGrid.centered(48)
    steps = divisors(48)
    for _ in range(20):
        G = GaborSystem(random_signal(grid, rng), int(rng.choice(steps)), int(rng.choice(steps)))
        eig = np.linalg.eigvalsh(frame_operator_matrix(G))
        assert eig[0] >= -1e-12 * max(eig[-1], 1.0)
        f = random_signal(grid, rng)
        assert inner(frame_operator_apply(G, f), f).real >= -1e-12


def test_block_window_gives_orthonormal_basis(grid64, rng):
    values = np.zeros(64)
    values[:8] = 1.0
    G = GaborSystem(FiniteSignal(values, grid64).normalized(), 8, 8)
    f = random_signal(grid64, rng)
    np.testing.assert_allclose(frame_operator_apply(G, f).values, f.values, atol=1e-12)
    report = frame_bounds(G)
    assert report.A == pytest.approx(1.0, abs=1e-12)
    assert report.B == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("method", ["dense_eig", "iterative"])
def test_zero_window_has_zero_bounds(grid64, rng, method):
    G = GaborSystem(FiniteSignal(np.zeros(64), grid64), 4, 8)
    f = random_signal(grid64, rng)
    np.testing.assert_array_equal(frame_operator_apply(G, f).values, np.zeros(64))
    report = frame_bounds(G, method)
    assert report.A == 0.0 and report.B == 0.0
    assert not report.is_frame


def test_offset_grid_origin(rng):
    grid = TimeGrid(64, 0.125, 0.0625)
    g = sample(Gaussian(), grid)
    G = GaborSystem(g, 4, 8)
    aligned = GaborSystem(FiniteSignal(g.values, TimeGrid(64, 0.125, 0.0)), 4, 8)
    report, expected = frame_bounds(G), frame_bounds(aligned)
    assert report.A == pytest.approx(expected.A, rel=1e-10)
    assert report.B == pytest.approx(expected.B, rel=1e-10)
    f = random_signal(grid, rng)
    c = rng.standard_normal((16, 8)) + 1j * rng.standard_normal((16, 8))
    assert np.vdot(c, analysis(G, f)) == pytest.approx(inner(f, synthesis(G, c)), abs=1e-12)
    back = synthesis(G.with_window(canonical_dual(G)), analysis(G, f))
    np.testing.assert_allclose(back.values, f.values, atol=1e-8)


# ---------------- Duals ----------------

def test_canonical_dual_satisfies_wexler_raz(redundant, rng):
    gd = canonical_dual(redundant)
    assert wexler_raz_residual(redundant.window, gd, redundant) <= 1e-7
    f = random_signal(redundant.grid, rng)
    back = synthesis(redundant.with_window(gd), analysis(redundant, f))
    np.testing.assert_allclose(back.values, f.values, atol=1e-8)


def test_dual_frame_operator_is_the_inverse(redundant):
    S = frame_operator_matrix(redundant)
    S_dual = frame_operator_matrix(redundant.with_window(canonical_dual(redundant)))
    np.testing.assert_allclose(S_dual @ S, np.eye(redundant.L), atol=1e-7)


def test_canonical_coefficients_have_minimal_norm(redundant, rng):
    dual = redundant.with_window(canonical_dual(redundant))
    f = random_signal(redundant.grid, rng)
    c = analysis(dual, f)
    for _ in range(10):
        d = rng.standard_normal(c.shape) + 1j * rng.standard_normal(c.shape)
        # d minus its projection onto the range of the analysis map synthesizes to zero
        u = d - analysis(dual, synthesis(redundant, d))
        assert np.linalg.norm(synthesis(redundant, u).values) <= 1e-7 * np.linalg.norm(d)
        np.testing.assert_allclose(synthesis(redundant, c + u).values, f.values, atol=1e-7)
        assert np.linalg.norm(c + u) ** 2 == pytest.approx(np.linalg.norm(c) ** 2 + np.linalg.norm(u) ** 2, rel=1e-7)


def test_canonical_dual_refuses_critical_gaussian(g0_64):
    with pytest.raises(NumericalError) as err:
        canonical_dual(GaborSystem(g0_64, 8, 8))
    assert err.value.code == "gabor.not_a_frame"


def test_tight_window_gives_parseval_frame(redundant):
    t = tight_window(redundant)
    report = frame_bounds(redundant.with_window(t))
    assert report.A == pytest.approx(1.0, abs=1e-8)
    assert report.B == pytest.approx(1.0, abs=1e-8)


def test_frame_algorithm_reaches_the_dual(redundant):
    report = frame_bounds(redundant)
    iterated = frame_algorithm(redundant, redundant.window, report.A, report.B)
    np.testing.assert_allclose(iterated.values, canonical_dual(redundant).values, atol=1e-7)


def test_fundamental_identity(rng):
    grid = TimeGrid.centered(48)
    G = GaborSystem(sample(Gaussian(), grid), 4, 6)
    for _ in range(20):
        f, h, g, gt = (random_signal(grid, rng) for _ in range(4))
        lhs, rhs = figa_check(f, h, g, gt, G)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


# ---------------- Scans ----------------

@pytest.fixture(scope="module")
def scan144():
    return frame_set_scan(Gaussian(), divisor_pairs(144), L=144, threads=4)


def test_scan_covers_every_divisor_pair(scan144):
    assert len(scan144) == 15 * 15
    assert list(scan144.columns) == ["a", "b", "density", "A", "B", "condition", "method"]


def test_scan_matches_lattice_frame_set(scan144):
    ab = scan144["a"] * scan144["b"]
    inside = scan144[(ab < 144) & (scan144[["a", "b"]].max(axis=1) <= 36)]
    assert (inside["A"] > 1e-6).all()
    outside = scan144[ab > 144]
    assert (outside["A"] <= 1e-10).all()
    critical = scan144[ab == 144]
    # (9, 16) and (16, 9): the sampled Zak grid misses the zero at (1/2, 1/2) by 1/18
    off_grid = critical["a"].isin([9, 16])
    assert (critical.loc[~off_grid, "A"] < 1e-3 * critical.loc[~off_grid, "B"]).all()
    assert (critical.loc[off_grid, "A"] < 1e-2 * critical.loc[off_grid, "B"]).all()


def test_condition_grows_toward_critical_density(scan144):
    diag = scan144[scan144["a"] == scan144["b"]].set_index("a")["condition"]
    chain = [diag[s] for s in (4, 6, 8, 9, 12)]
    assert all(x < y for x, y in zip(chain, chain[1:]))
    assert chain[-1] == math.inf


def test_nested_lattices_never_gain_bounds(scan144):
    assert nested_violations(scan144).empty


def test_scan_rejects_non_dividing_pairs():
    with pytest.raises(ValidationError):
        frame_set_scan(Gaussian(), scan_pairs([5], [4]), L=64)
