"""Gabor systems on the finite model.

Atoms are ``M_{(n b + Q m a) domega} T_{m a dt} g``: time steps of ``a`` samples,
frequency steps of ``b`` bins, and an optional integer shear ``Q`` for chirped
images of the separable lattice. The frame operator is never inverted densely
outside the oracle; duals come from conjugate gradients.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, cg, eigsh

from .config import (
    CG_MAXITER_FACTOR,
    CG_RTOL,
    DENSE_ORACLE_MAX_L,
    EIGSH_TOL,
    FRAME_TOLERANCE,
    NEUMANN_MAXITER,
    SCAN_COLS,
    resolve_threads,
)
from .core import FiniteSignal, Lattice, TimeGrid, sample
from .errors import NumericalError, ValidationError, require

logger = logging.getLogger(__name__)

FRAME_METHODS = ("dense_eig", "iterative", "zak", "auto")


@dataclass(frozen=True)
class GaborSystem:
    window: FiniteSignal
    a: int
    b: int
    shear: int = 0

    def __post_init__(self):
        L = self.window.length
        for name in ("a", "b"):
            v = getattr(self, name)
            require(int(v) == v and v >= 1 and L % int(v) == 0, "gabor.bad_lattice",
                    f"lattice step {name} = {v} must divide L = {L}")
            object.__setattr__(self, name, int(v))
        require(int(self.shear) == self.shear, "gabor.bad_lattice", f"shear must be an integer, got {self.shear}")
        object.__setattr__(self, "shear", int(self.shear))

    @property
    def L(self) -> int:
        return self.window.length

    @property
    def grid(self) -> TimeGrid:
        return self.window.grid

    @property
    def n_time(self) -> int:
        return self.L // self.a

    @property
    def n_freq(self) -> int:
        return self.L // self.b

    @property
    def n_atoms(self) -> int:
        return self.n_time * self.n_freq

    @property
    def density(self) -> float:
        return self.L / (self.a * self.b)

    @property
    def volume(self) -> float:
        return self.a * self.b / self.L

    @property
    def lattice(self) -> Lattice:
        dt, dw = self.grid.step, self.grid.freq_step
        return Lattice(np.array([[self.a * dt, 0.0], [self.shear * self.a * dw, self.b * dw]]))

    def with_window(self, window: FiniteSignal) -> GaborSystem:
        return GaborSystem(window, self.a, self.b, self.shear)

    def adjoint(self, window: FiniteSignal | None = None) -> GaborSystem:
        """System over the adjoint lattice (L/b) x (L/a)."""
        require(self.shear == 0, "gabor.sheared_adjoint", "adjoint systems are built for separable lattices only")
        return GaborSystem(self.window if window is None else window, self.L // self.b, self.L // self.a)

    def bins(self) -> np.ndarray:
        """Frequency bin of atom (m, n)."""
        m = np.arange(self.n_time)[:, None]
        n = np.arange(self.n_freq)[None, :]
        return n * self.b + self.shear * m * self.a


@dataclass(frozen=True)
class FrameReport:
    A: float
    B: float
    condition: float
    method: str

    @classmethod
    def from_bounds(cls, A: float, B: float, method: str) -> FrameReport:
        A = max(float(A), 0.0)
        B = max(float(B), 0.0)
        framed = B > 0 and A > FRAME_TOLERANCE * B
        return cls(A, B, B / A if framed else math.inf, method)

    @property
    def is_frame(self) -> bool:
        return math.isfinite(self.condition)

    def to_record(self) -> dict:
        return {"A": self.A, "B": self.B, "condition": self.condition, "method": self.method}


# ---------------- Analysis and synthesis ----------------

def _shifted_rows(G: GaborSystem) -> np.ndarray:
    idx = (np.arange(G.L)[None, :] - (np.arange(G.n_time) * G.a)[:, None]) % G.L
    return G.window.values[idx]


def analysis(G: GaborSystem, f: FiniteSignal) -> np.ndarray:
    """c[m, n] = <f, pi(lambda_mn) g>."""
    require(f.length == G.L, "gabor.length_mismatch", f"signal length {f.length} != window length {G.L}")
    n0 = G.grid.index_origin
    spectra = np.fft.fft(f.values[None, :] * np.conj(_shifted_rows(G)), axis=1)
    kappa = G.bins()
    coeffs = np.take_along_axis(spectra, kappa % G.L, axis=1)
    return f.dt * coeffs * np.exp(-2j * np.pi * kappa * n0 / G.L)


def synthesis(G: GaborSystem, c: np.ndarray) -> FiniteSignal:
    """sum_mn c[m, n] pi(lambda_mn) g."""
    c = np.asarray(c, dtype=complex)
    require(c.shape == (G.n_time, G.n_freq), "gabor.bad_coefficients",
            f"coefficients must have shape {(G.n_time, G.n_freq)}, got {c.shape}")
    L = G.L
    n0 = G.grid.index_origin
    spectrum = np.zeros((G.n_time, L), dtype=complex)
    base = np.arange(G.n_freq) * G.b
    spectrum[:, base] = c * np.exp(2j * np.pi * base * n0 / L)[None, :]
    rows = L * np.fft.ifft(spectrum, axis=1)
    p = np.arange(L) + n0
    chirp = np.exp(2j * np.pi * G.shear * np.outer(np.arange(G.n_time) * G.a, p) / L)
    return FiniteSignal(np.sum(rows * chirp * _shifted_rows(G), axis=0), G.grid)


def frame_operator_apply(G: GaborSystem, f: FiniteSignal) -> FiniteSignal:
    """S f = sum <f, pi(lambda) g> pi(lambda) g over all lattice atoms."""
    return synthesis(G, analysis(G, f))


def frame_operator_matrix(G: GaborSystem) -> np.ndarray:
    """Dense S assembled in Walnut form: S[p, q] nonzero only for p = q mod L/b."""
    require(G.L <= DENSE_ORACLE_MAX_L, "gabor.dense_cap", f"dense oracle limited to L <= {DENSE_ORACLE_MAX_L}, got L = {G.L}")
    L = G.L
    n0 = G.grid.index_origin
    p = np.arange(L)
    psi = _shifted_rows(G) * np.exp(2j * np.pi * G.shear * np.outer(np.arange(G.n_time) * G.a, p + n0) / L)
    mask = ((p[:, None] - p[None, :]) % G.n_freq) == 0
    return G.window.dt * G.n_freq * mask * (psi.T @ np.conj(psi))


def _operator(G: GaborSystem) -> LinearOperator:
    grid = G.grid
    matvec = lambda v: frame_operator_apply(G, FiniteSignal(np.ravel(v), grid)).values
    return LinearOperator((G.L, G.L), matvec=matvec, rmatvec=matvec, dtype=complex)


def _cg_solve(G: GaborSystem, rhs: FiniteSignal) -> np.ndarray:
    maxiter = CG_MAXITER_FACTOR * G.L
    x, info = cg(_operator(G), rhs.values, rtol=CG_RTOL, maxiter=maxiter)
    residual = np.linalg.norm(frame_operator_apply(G, FiniteSignal(x, G.grid)).values - rhs.values)
    residual /= max(np.linalg.norm(rhs.values), np.finfo(float).tiny)
    if info != 0 or residual > 10 * CG_RTOL:
        raise NumericalError("gabor.cg_no_convergence",
                             f"conjugate gradient did not converge after {maxiter} iterations: residual {residual:.3e}")
    return x


# ---------------- Frame bounds ----------------

def frame_bounds(G: GaborSystem, method: str = "dense_eig") -> FrameReport:
    """Optimal frame bounds A = lambda_min(S), B = lambda_max(S); ``auto`` picks dense up to DENSE_ORACLE_MAX_L."""
    if method == "auto":
        method = "dense_eig" if G.L <= DENSE_ORACLE_MAX_L else "iterative"
    if method == "dense_eig":
        eig = linalg.eigvalsh(frame_operator_matrix(G))
        logger.debug("dense eigensolve L=%d a=%d b=%d", G.L, G.a, G.b)
        return FrameReport.from_bounds(eig[0], eig[-1], method)
    if method == "iterative":
        return _iterative_bounds(G)
    if method == "zak":
        from .zak import zak_frame_bounds

        require(G.a * G.b == G.L and G.shear == 0, "gabor.zak_needs_critical",
                f"Zak bounds need a critical separable lattice (a b = L), got a={G.a}, b={G.b}, L={G.L}")
        return zak_frame_bounds(G.window, G.a)
    raise ValidationError("gabor.unknown_method", f"unknown frame-bound method {method!r}; known: {FRAME_METHODS}")


def _iterative_bounds(G: GaborSystem) -> FrameReport:
    op = _operator(G)
    if not np.any(G.window.values):
        return FrameReport.from_bounds(0.0, 0.0, "iterative")
    try:
        B = float(np.real(eigsh(op, k=1, which="LA", tol=EIGSH_TOL, return_eigenvectors=False)[0]))
        # lambda_min(S) = B - lambda_max(B I - S)
        shifted = LinearOperator(op.shape, matvec=lambda v: B * np.ravel(v) - np.ravel(op.matvec(v)), dtype=complex)
        A = B - float(np.real(eigsh(shifted, k=1, which="LA", tol=EIGSH_TOL, return_eigenvectors=False)[0]))
    except ArpackNoConvergence as exc:
        raise NumericalError("gabor.eigs_no_convergence", f"Lanczos iteration did not converge: {exc}") from None
    if A > FRAME_TOLERANCE * B:
        # refine the small end by inverse iteration on S^{-1}, applied through CG solves
        inv = LinearOperator(op.shape, matvec=lambda v: _cg_solve(G, FiniteSignal(np.ravel(v), G.grid)), dtype=complex)
        try:
            mu = float(np.real(eigsh(inv, k=1, which="LA", tol=EIGSH_TOL, return_eigenvectors=False)[0]))
        except ArpackNoConvergence as exc:
            raise NumericalError("gabor.eigs_no_convergence", f"inverse iteration did not converge: {exc}") from None
        A = 1 / mu
    logger.debug("iterative bounds L=%d a=%d b=%d: A=%.6g B=%.6g", G.L, G.a, G.b, A, B)
    return FrameReport.from_bounds(A, B, "iterative")


def _require_frame(report: FrameReport) -> None:
    if not report.is_frame:
        raise NumericalError("gabor.not_a_frame", f"lower frame bound ≈ 0 (A = {report.A:.3e}, B = {report.B:.3e})")


# ---------------- Dual and tight windows ----------------

def canonical_dual(G: GaborSystem) -> FiniteSignal:
    """S^{-1} g by conjugate gradients."""
    _require_frame(frame_bounds(G, "auto"))
    return FiniteSignal(_cg_solve(G, G.window), G.grid)


def tight_window(G: GaborSystem) -> FiniteSignal:
    """S^{-1/2} g from the Hermitian eigendecomposition of S."""
    S = frame_operator_matrix(G)
    eig, vec = linalg.eigh(S)
    _require_frame(FrameReport.from_bounds(eig[0], eig[-1], "dense_eig"))
    root = (vec * eig ** -0.5) @ vec.conj().T
    return FiniteSignal(root @ G.window.values, G.grid)


def frame_algorithm(G: GaborSystem, f: FiniteSignal, A: float, B: float, tol: float = CG_RTOL) -> FiniteSignal:
    """S^{-1} f by the Neumann series x <- x + 2/(A+B) (f - S x)."""
    require(0 < A <= B, "gabor.bad_bounds", f"frame algorithm needs 0 < A <= B, got A={A}, B={B}")
    lam = 2 / (A + B)
    x = np.zeros(G.L, dtype=complex)
    target = np.linalg.norm(f.values)
    for it in range(NEUMANN_MAXITER):
        r = f.values - frame_operator_apply(G, FiniteSignal(x, G.grid)).values
        if np.linalg.norm(r) <= tol * target:
            logger.debug("frame algorithm converged in %d iterations", it)
            return FiniteSignal(x, G.grid)
        x = x + lam * r
    raise NumericalError("gabor.neumann_no_convergence",
                         f"frame algorithm did not converge in {NEUMANN_MAXITER} iterations: residual {np.linalg.norm(r) / target:.3e}")


# ---------------- Duality identities and bounds ----------------

def wexler_raz_residual(g: FiniteSignal, gtilde: FiniteSignal, G: GaborSystem) -> float:
    """max over adjoint points of |<gtilde, pi(mu) g> - vol delta_{mu, 0}|."""
    c = analysis(G.adjoint(g), gtilde)
    c[0, 0] -= G.volume
    return float(np.max(np.abs(c)))


def figa_check(f: FiniteSignal, h: FiniteSignal, g: FiniteSignal, gtilde: FiniteSignal,
               G: GaborSystem) -> tuple[complex, complex]:
    """Both sides of sum_Lambda V_g f conj(V_gt h) = vol^{-1} sum_adjoint V_g gt conj(V_f h)."""
    lhs = np.sum(analysis(G.with_window(g), f) * np.conj(analysis(G.with_window(gtilde), h)))
    rhs = np.sum(analysis(G.adjoint(g), gtilde) * np.conj(analysis(G.adjoint(f), h))) / G.volume
    return complex(lhs), complex(rhs)


def tolimieri_orr_bound(G: GaborSystem) -> tuple[float, float]:
    """(sum_Lambda |V_g g|^2 / |g|^2, vol^{-1} sum_adjoint |V_g g|): a lower and an upper estimate of B."""
    g = G.window
    energy = g.norm ** 2
    require(energy > 0, "gabor.zero_window", "zero window")
    lower = float(np.sum(np.abs(analysis(G, g)) ** 2) / energy)
    upper = float(np.sum(np.abs(analysis(G.adjoint(), g))) / G.volume)
    return lower, upper


def janssen_lower_bound(G: GaborSystem) -> float:
    """Minimum over the fundamental cell of the adjoint-lattice symbol vol^{-1} sum A g(mu) e^{2 pi i sigma(mu, z)}."""
    density = G.L / (G.a * G.b)
    if G.shear != 0 or (G.L % (G.a * G.b)) or int(density) % 2:
        raise ValidationError("gabor.hypothesis_not_met",
                              f"hypothesis of the cited result not met: density {density:g} is not an even integer")
    # at even density e^{pi i x omega} = 1 on the adjoint lattice, so A g = V_g g there
    c = analysis(G.adjoint(), G.window)
    symbol = G.b * np.fft.fft(np.fft.ifft(c, axis=0), axis=1) / G.volume
    return float(np.min(symbol.real))


# ---------------- Frame-set scans ----------------

def scan_pairs(a_list, b_list) -> list[tuple[int, int]]:
    return [(int(a), int(b)) for a, b in product(a_list, b_list)]


def divisors(L: int) -> list[int]:
    return [d for d in range(1, L + 1) if L % d == 0]


def divisor_pairs(L: int) -> list[tuple[int, int]]:
    return scan_pairs(divisors(L), divisors(L))


def frame_set_scan(window, pairs, L: int | None = None, method: str = "dense_eig",
                   threads: int | None = None) -> pd.DataFrame:
    """Frame bounds for each (a, b), one row per lattice, in input order."""
    if isinstance(window, FiniteSignal):
        g = window
    else:
        require(L is not None, "gabor.missing_length", "scanning a closed-form window needs L")
        g = sample(window, TimeGrid.centered(L))
    pairs = list(pairs)
    for a, b in pairs:
        require(g.length % a == 0 and g.length % b == 0, "gabor.bad_lattice",
                f"lattice ({a}, {b}) does not divide L = {g.length}")

    def cell(pair):
        a, b = pair
        report = frame_bounds(GaborSystem(g, a, b), method)
        return {"a": a, "b": b, "density": g.length / (a * b), **report.to_record()}

    workers = min(resolve_threads(threads), max(1, len(pairs)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(cell, pairs))
    logger.debug("scanned %d lattices with %d workers", len(rows), workers)
    return pd.DataFrame(rows, columns=SCAN_COLS)


def nested_violations(table: pd.DataFrame, rtol: float = 1e-9) -> pd.DataFrame:
    """Pairs of scanned lattices with Lambda2 inside Lambda1 whose bounds increase; empty when consistent."""
    scale = float(table["B"].max()) if len(table) else 0.0
    bad = []
    for r1, r2 in product(table.itertuples(index=False), repeat=2):
        if (r1.a, r1.b) == (r2.a, r2.b) or r2.a % r1.a or r2.b % r1.b:
            continue
        if r2.A > r1.A + rtol * scale or r2.B > r1.B + rtol * scale:
            bad.append({"a1": r1.a, "b1": r1.b, "a2": r2.a, "b2": r2.b,
                        "A1": r1.A, "A2": r2.A, "B1": r1.B, "B2": r2.B})
    return pd.DataFrame(bad, columns=["a1", "b1", "a2", "b2", "A1", "A2", "B1", "B2"])
