"""Shared constants for tfrlab. Every module reads its tolerances and caps from here."""

import os

# ---------------- Tolerances ----------------

NORM_TOLERANCE = 1e-10
GRID_ALIGNMENT_TOLERANCE = 1e-9
FRAME_TOLERANCE = 1e-8            # A < FRAME_TOLERANCE * B  ->  not a frame
SYNTHESIS_PAIR_TOLERANCE = 1e-12
SERIES_TAIL = 1e-15
SYMMETRY_TOLERANCE = 1e-12

# ---------------- Solvers ----------------

CG_RTOL = 1e-10
CG_MAXITER_FACTOR = 10
EIGSH_TOL = 1e-12
DENSE_ORACLE_MAX_L = 512
NEUMANN_MAXITER = 10_000

# ---------------- Windows ----------------

HERMITE_MAX_ORDER = 64
DEFAULT_PERIODIZE_K = 4
SUPPORT_CUTOFF = 1e-18            # |f| below this outside the effective support

# ---------------- Bargmann / Fock ----------------

BARGMANN_STEP = 1 / 32
BARGMANN_HALF_WIDTH = 4.5
BARGMANN_MAX_RADIUS = 6.0
FOCK_RADIUS = 4.0
FOCK_STEP = 0.05
FOCK_VALIDITY_MARGIN = 2.5
HUDSON_FLOOR = 1e-9               # Wigner cells below this fraction of the peak are roundoff

# ---------------- Sampling ----------------

S0_FLAT_HALF_WIDTH = 0.25         # spectrum == 1 on [-1/4, 1/4]
S0_SUPPORT_HALF_WIDTH = 0.5       # spectrum == 0 outside [-1/2, 1/2]

# ---------------- CLI ----------------

THREADS_ENV = "TFRLAB_THREADS"
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

SIGNAL_COLS = ["t", "re", "im"]
SAMPLE_COLS = ["k", "re", "im"]
SCAN_COLS = ["a", "b", "density", "A", "B", "condition", "method"]
FOCK_COLS = ["re_z", "im_z", "re_B", "im_B"]

COLUMN_ALIASES = {
    "t": "t", "time": "t", "times": "t", "seconds": "t",
    "k": "k", "index": "k", "n": "k", "sample": "k",
    "re": "re", "real": "re", "real part": "re", "x": "re",
    "im": "im", "imag": "im", "imaginary": "im", "imaginary part": "im", "y": "im",
}


def resolve_threads(cli_value: int | None = None) -> int:
    """Worker cap: ``--threads`` wins over ``TFRLAB_THREADS``, which wins over the CPU count."""
    from .errors import ValidationError

    raw = cli_value if cli_value is not None else os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return max(1, os.cpu_count() or 1)
    try:
        n = int(raw)
    except (TypeError, ValueError):
        raise ValidationError("cli.bad_threads", f"thread count must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError("cli.bad_threads", f"thread count must be >= 1, got {n}")
    return n
