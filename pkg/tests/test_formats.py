import io
import json
import math

import numpy as np
import pandas as pd
import pytest

from tfrlab import formats
from tfrlab.core import FiniteSignal, TimeGrid, random_signal
from tfrlab.errors import ValidationError
from tfrlab.export import SCAN_SHEET, build_excel_bytes, scan_to_csv
from tfrlab.sampling import SampleSet
from tfrlab.tfr import stft
from tfrlab.zak import zak_finite


def test_binary_signal_round_trip(tmp_path, grid64, rng):
    f = random_signal(grid64, rng)
    path = tmp_path / "f.bin"
    formats.write_signal(f, path)
    back = formats.read_signal(path)
    assert back.grid == f.grid
    np.testing.assert_array_equal(back.values, f.values)


def test_csv_signal_with_alias_headers(tmp_path):
    path = tmp_path / "f.csv"
    t = -2 + 0.5 * np.arange(8)
    pd.DataFrame({" Time ": t, "Real": np.cos(t), "Imag": np.sin(t)}).to_csv(path, index=False)
    f = formats.read_signal(path)
    assert f.length == 8
    assert f.dt == pytest.approx(0.5)
    assert f.grid.origin == pytest.approx(-2.0)
    np.testing.assert_allclose(f.values, np.exp(1j * t))


def test_csv_signal_needs_uniform_grid(tmp_path):
    path = tmp_path / "f.csv"
    pd.DataFrame({"t": [0.0, 0.5, 1.5], "re": [1, 2, 3], "im": [0, 0, 0]}).to_csv(path, index=False)
    with pytest.raises(ValidationError) as err:
        formats.read_signal(path)
    assert err.value.code == "formats.bad_grid"


def test_csv_signal_missing_column(tmp_path):
    path = tmp_path / "f.csv"
    pd.DataFrame({"t": [0.0, 0.5], "re": [1, 2]}).to_csv(path, index=False)
    with pytest.raises(ValidationError) as err:
        formats.read_signal(path)
    assert err.value.code == "formats.missing_columns"


@pytest.mark.parametrize("name", ["empty.bin", "empty.csv"])
def test_empty_file(tmp_path, name):
    path = tmp_path / name
    path.write_bytes(b"")
    with pytest.raises(ValidationError) as err:
        formats.read_signal(path)
    assert err.value.code == "formats.empty"
    assert err.value.message.startswith("empty input file")


def test_malformed_header(tmp_path):
    path = tmp_path / "f.bin"
    path.write_bytes(b"not json\n" + b"\x00" * 16)
    with pytest.raises(ValidationError) as err:
        formats.read_signal(path)
    assert err.value.code == "formats.bad_header"


def test_truncated_payload(tmp_path, grid64, rng):
    path = tmp_path / "f.bin"
    formats.write_signal(random_signal(grid64, rng), path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValidationError) as err:
        formats.read_signal(path)
    assert err.value.code == "formats.truncated"


def test_wrong_kind(tmp_path, g0_64):
    path = tmp_path / "z.bin"
    formats.write_zak(zak_finite(g0_64, 8), path)
    with pytest.raises(ValidationError) as err:
        formats.read_signal(path)
    assert err.value.code == "formats.wrong_kind"


def test_tf_matrix_round_trip(tmp_path, g0_64, rng):
    V = stft(random_signal(g0_64.grid, rng), g0_64, time_hop=2)
    path = tmp_path / "v.bin"
    formats.write_tf_matrix(V, path)
    back = formats.read_tf_matrix(path)
    np.testing.assert_array_equal(back.values, V.values)
    assert (back.x0, back.dx, back.omega0, back.domega) == (V.x0, V.dx, V.omega0, V.domega)
    assert back.repr == V.repr


def test_zak_round_trip(tmp_path, g0_64):
    Z = zak_finite(g0_64, 8)
    path = tmp_path / "z.bin"
    formats.write_zak(Z, path)
    back = formats.read_zak(path)
    assert (back.N, back.M) == (8, 8)
    np.testing.assert_array_equal(back.values, Z.values)


def test_sample_set_with_sidecar(tmp_path):
    s = SampleSet(np.arange(5) + 1j, 0.5, k_min=-2, band=2.0)
    path = tmp_path / "s.csv"
    formats.write_sample_set(s, path)
    assert json.loads((tmp_path / "s.csv.json").read_text()) == {"T": 0.5, "band": 2.0}
    back = formats.read_sample_set(path)
    assert (back.T, back.k_min, back.band) == (0.5, -2, 2.0)
    np.testing.assert_allclose(back.values, s.values)


def test_sample_set_needs_sidecar(tmp_path):
    path = tmp_path / "s.csv"
    pd.DataFrame({"k": [0, 1], "re": [1.0, 2.0], "im": [0.0, 0.0]}).to_csv(path, index=False)
    with pytest.raises(ValidationError) as err:
        formats.read_sample_set(path)
    assert err.value.code == "formats.missing_sidecar"


def test_json_summary_spells_out_infinities():
    text = formats.dumps({"condition": math.inf, "z": 1 + 2j, "flags": np.array([True])})
    assert json.loads(text) == {"condition": "inf", "z": {"re": 1.0, "im": 2.0}, "flags": [True]}


# ---------------- Scan export ----------------

def _scan():
    return pd.DataFrame({"a": [4, 8], "b": [8, 8], "density": [2.0, 1.0], "A": [0.5, 0.0],
                         "B": [2.0, 2.0], "condition": [4.0, math.inf], "method": ["dense_eig", "zak"]})


def test_scan_csv(tmp_path):
    path = tmp_path / "scan.csv"
    scan_to_csv(_scan(), path)
    back = pd.read_csv(path)
    assert list(back.columns) == ["a", "b", "density", "A", "B", "condition", "method"]
    assert math.isinf(back["condition"][1])


def test_scan_workbook():
    raw = build_excel_bytes(_scan())
    back = pd.read_excel(io.BytesIO(raw), sheet_name=SCAN_SHEET)
    assert list(back["a"]) == [4, 8]
    assert back["condition"][0] == pytest.approx(4.0)
    assert back["condition"][1] == "inf"


def test_signal_header_records_grid(tmp_path):
    grid = TimeGrid(16, 0.25, -2.0)
    path = tmp_path / "f.bin"
    formats.write_signal(FiniteSignal(np.ones(16), grid), path)
    header = json.loads(path.read_bytes().split(b"\n", 1)[0])
    assert header["length"] == 16 and header["dt"] == 0.25 and header["t0"] == -2.0
    assert header["dtype"] == "c128"
