"""Tabular export of frame-set scans: CSV and a formatted .xlsx workbook."""

import io
import math

import pandas as pd
from openpyxl.styles import Font, PatternFill

from .config import SCAN_COLS

SCAN_SHEET = "Frame scan"
_HEADER_FILL = PatternFill(start_color="FFDDEBF7", end_color="FFDDEBF7", fill_type="solid")


def _with_text_infinities(df: pd.DataFrame) -> pd.DataFrame:
    out = df.copy()
    for c in out.columns:
        if pd.api.types.is_float_dtype(out[c]) and not out[c].map(math.isfinite).all():
            out[c] = out[c].map(lambda x: x if math.isfinite(x) else ("inf" if x > 0 else "nan"))
    return out


def scan_to_csv(table: pd.DataFrame, path) -> None:
    table[SCAN_COLS].to_csv(path, index=False, float_format="%.17g")


def build_excel_bytes(table: pd.DataFrame) -> bytes:
    out = _with_text_infinities(table[SCAN_COLS])
    buf = io.BytesIO()
    with pd.ExcelWriter(buf, engine="openpyxl") as writer:
        out.to_excel(writer, index=False, sheet_name=SCAN_SHEET)
        ws = writer.sheets[SCAN_SHEET]
        col_map = {cell.value: cell.column for cell in ws[1]}
        for cell in ws[1]:
            cell.font = Font(bold=True)
            cell.fill = _HEADER_FILL
        formats = {"density": "0.0000", "A": "0.000000E+00", "B": "0.000000E+00", "condition": "0.000000E+00"}
        for name, fmt in formats.items():
            c = col_map.get(name)
            if c:
                for r in range(2, ws.max_row + 1):
                    ws.cell(row=r, column=c).number_format = fmt
        for col in range(1, ws.max_column + 1):
            max_len = max(
                (len(str(ws.cell(row=r, column=col).value or "")) for r in range(1, ws.max_row + 1)),
                default=10,
            )
            ws.column_dimensions[ws.cell(row=1, column=col).column_letter].width = min(max(10, max_len + 2), 40)
        ws.freeze_panes = "A2"
    return buf.getvalue()


def write_scan_xlsx(table: pd.DataFrame, path) -> None:
    with open(path, "wb") as fh:
        fh.write(build_excel_bytes(table))
