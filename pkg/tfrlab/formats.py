"""Reading and writing signals, TF/Zak matrices, sample sets and Fock tables.

Binary files are one JSON header line terminated by ``\\n`` followed by
little-endian interleaved float64 (re, im) pairs, row-major. CSV files go
through the same header normalization the spreadsheet importers use.
"""

from __future__ import annotations

import json
import logging
import math
import re
from pathlib import Path

import numpy as np
import pandas as pd

from .config import COLUMN_ALIASES, SAMPLE_COLS, SIGNAL_COLS
from .core import FiniteSignal, TFPoint, TimeGrid
from .errors import ValidationError, require
from .tfr import TFMatrix

logger = logging.getLogger(__name__)

DTYPE = "<c16"
SIGNAL_SCHEMA = 'expected a JSON header line {"length", "dt", "t0", "dtype": "c128"} followed by float64 pairs, or a CSV with columns t,re,im'


# ---------------- JSON ----------------

def json_safe(obj):
    """Plain JSON types; non-finite floats become "inf" / "-inf" / "nan", complex numbers {re, im}."""
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, TFPoint):
        return {"x": json_safe(obj.x), "omega": json_safe(obj.omega)}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [json_safe(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": json_safe(float(obj.real)), "im": json_safe(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(json_safe(obj), allow_nan=False)


# ---------------- Binary container ----------------

def _write_binary(path, header: dict, values: np.ndarray) -> None:
    payload = np.ascontiguousarray(values, dtype=DTYPE)
    with open(path, "wb") as fh:
        fh.write(dumps({**header, "dtype": "c128"}).encode() + b"\n")
        fh.write(payload.tobytes())


def _read_binary(path, kind: str, schema: str) -> tuple[dict, np.ndarray]:
    raw = Path(path).read_bytes()
    if not raw.strip():
        raise ValidationError("formats.empty", f"empty input file {path}: {schema}")
    head, sep, body = raw.partition(b"\n")
    try:
        header = json.loads(head.decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValidationError("formats.bad_header", f"malformed header in {path}: {schema}") from exc
    if not sep or not isinstance(header, dict) or header.get("dtype") != "c128":
        raise ValidationError("formats.bad_header", f"malformed header in {path}: {schema}")
    if header.get("kind", kind) != kind:
        raise ValidationError("formats.wrong_kind", f"{path} holds a {header.get('kind')!r}, expected {kind!r}")
    if len(body) % 16:
        raise ValidationError("formats.truncated", f"{path}: payload is not a whole number of float64 pairs")
    return header, np.frombuffer(body, dtype=DTYPE)


def _field(header: dict, name: str, path, cast=float):
    if name not in header:
        raise ValidationError("formats.bad_header", f"header of {path} lacks {name!r}")
    try:
        return cast(header[name])
    except (TypeError, ValueError) as exc:
        raise ValidationError("formats.bad_header", f"header field {name!r} of {path} is not a number") from exc


# ---------------- CSV normalization ----------------

def clean_header(s: str) -> str:
    return re.sub(r"\s+", " ", str(s).strip()).lower()


def standardize_columns(df: pd.DataFrame) -> pd.DataFrame:
    df = df.copy()
    df = df.rename(columns={c: COLUMN_ALIASES.get(clean_header(c), str(c).strip()) for c in df.columns})
    df.columns = [str(c).strip() for c in df.columns]
    return df


def normalize_table(df: pd.DataFrame, required: list[str], path) -> pd.DataFrame:
    df = standardize_columns(df)
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise ValidationError("formats.missing_columns",
                              f"{path} is missing required columns {missing}; found {list(df.columns)}")
    df = df[required].dropna(how="all")
    for c in required:
        df[c] = pd.to_numeric(df[c], errors="coerce")
    if df.empty:
        raise ValidationError("formats.empty", f"empty input file {path}: no data rows")
    if df.isna().any().any():
        raise ValidationError("formats.bad_value", f"{path} has non-numeric or missing values")
    return df.reset_index(drop=True)


def _read_csv(path) -> pd.DataFrame:
    try:
        return pd.read_csv(path)
    except pd.errors.EmptyDataError as exc:
        raise ValidationError("formats.empty", f"empty input file {path}: {SIGNAL_SCHEMA}") from exc


def _is_csv(path) -> bool:
    return Path(path).suffix.lower() == ".csv"


# ---------------- Signals ----------------

def write_signal(f: FiniteSignal, path) -> None:
    if _is_csv(path):
        pd.DataFrame({"t": f.grid.times, "re": f.values.real, "im": f.values.imag},
                     columns=SIGNAL_COLS).to_csv(path, index=False, float_format="%.17g")
        return
    _write_binary(path, {"kind": "signal", "length": f.length, "dt": f.dt, "t0": f.grid.origin}, f.values)


def read_signal(path) -> FiniteSignal:
    if _is_csv(path):
        df = normalize_table(_read_csv(path), SIGNAL_COLS, path)
        t = df["t"].to_numpy()
        require(t.size >= 2, "formats.bad_grid", f"{path}: a signal needs at least two samples")
        steps = np.diff(t)
        require(bool(np.allclose(steps, steps[0], rtol=1e-9, atol=0)) and steps[0] > 0, "formats.bad_grid",
                f"{path}: time column is not a uniform increasing grid")
        grid = TimeGrid(t.size, float(steps[0]), float(t[0]))
        return FiniteSignal(df["re"].to_numpy() + 1j * df["im"].to_numpy(), grid)
    header, values = _read_binary(path, "signal", SIGNAL_SCHEMA)
    L = _field(header, "length", path, int)
    require(values.size == L, "formats.truncated", f"{path}: header declares {L} samples, payload holds {values.size}")
    grid = TimeGrid(L, _field(header, "dt", path), _field(header, "t0", path))
    return FiniteSignal(values, grid)


# ---------------- TF and Zak matrices ----------------

TF_SCHEMA = 'expected a JSON header line {"shape", "x0", "dx", "omega0", "domega", "dtype": "c128"} followed by float64 pairs'
ZAK_SCHEMA = 'expected a JSON header line {"N", "M", "x0", "dtype": "c128"} followed by float64 pairs'


def write_tf_matrix(V: TFMatrix, path) -> None:
    header = {"kind": "tf_matrix", "shape": list(V.shape), "x0": V.x0, "dx": V.dx,
              "omega0": V.omega0, "domega": V.domega, "repr": V.repr, "window": V.window}
    _write_binary(path, header, V.values)


def read_tf_matrix(path) -> TFMatrix:
    header, values = _read_binary(path, "tf_matrix", TF_SCHEMA)
    shape = header.get("shape")
    require(isinstance(shape, list) and len(shape) == 2, "formats.bad_header", f"malformed header in {path}: {TF_SCHEMA}")
    n, m = int(shape[0]), int(shape[1])
    require(values.size == n * m, "formats.truncated", f"{path}: header declares {n}x{m}, payload holds {values.size}")
    return TFMatrix(values.reshape(n, m), _field(header, "x0", path), _field(header, "dx", path),
                    _field(header, "omega0", path), _field(header, "domega", path),
                    str(header.get("repr", "stft")), header.get("window"))


def write_zak(Z, path) -> None:
    _write_binary(path, {"kind": "zak", "N": Z.N, "M": Z.M, "x0": Z.x0}, Z.values)


def read_zak(path):
    from .zak import ZakMatrix

    header, values = _read_binary(path, "zak", ZAK_SCHEMA)
    N, M = _field(header, "N", path, int), _field(header, "M", path, int)
    require(values.size == N * M, "formats.truncated", f"{path}: header declares {N}x{M}, payload holds {values.size}")
    return ZakMatrix(values.reshape(N, M), N, M, _field(header, "x0", path))


# ---------------- Sample sets ----------------

def _sidecar(path) -> Path:
    return Path(str(path) + ".json")


def write_sample_set(s, path) -> None:
    pd.DataFrame({"k": s.indices, "re": s.values.real, "im": s.values.imag},
                 columns=SAMPLE_COLS).to_csv(path, index=False, float_format="%.17g")
    _sidecar(path).write_text(dumps({"T": s.T, "band": s.band}) + "\n")


def read_sample_set(path):
    from .sampling import SampleSet

    df = normalize_table(_read_csv(path), SAMPLE_COLS, path)
    k = df["k"].to_numpy()
    require(bool(np.all(k == np.round(k))), "formats.bad_value", f"{path}: sample indices must be integers")
    k = k.astype(int)
    order = np.argsort(k)
    k = k[order]
    require(bool(np.all(np.diff(k) == 1)), "formats.bad_value", f"{path}: sample indices must be consecutive")
    side = _sidecar(path)
    if not side.exists():
        raise ValidationError("formats.missing_sidecar", f"sample set {path} needs a sidecar {side.name} with {{T, band}}")
    try:
        meta = json.loads(side.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError("formats.bad_header", f"sidecar {side} is not valid JSON") from exc
    require(isinstance(meta, dict) and "T" in meta, "formats.bad_header", f"sidecar {side} must hold {{T, band}}")
    band = meta.get("band")
    values = (df["re"].to_numpy() + 1j * df["im"].to_numpy())[order]
    return SampleSet(values, float(meta["T"]), int(k[0]), None if band is None else float(band))


# ---------------- Fock tables ----------------

def write_fock(samples, path) -> None:
    samples.to_frame().to_csv(path, index=False, float_format="%.17g")
