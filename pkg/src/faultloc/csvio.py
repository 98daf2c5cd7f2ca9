"""CSV interchange: '#'-prefixed ``key = value`` header comments, then a column row."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from faultloc.model import ValidationError
from faultloc.simulate import Waveform


def fmt(x) -> str:
    # 17 significant digits round-trip a double exactly
    return format(float(x), ".17g")


def write_table(path, columns: list[str], rows: np.ndarray, meta: dict | None = None) -> None:
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        buf.write(f"# {k} = {fmt(v) if isinstance(v, (float, np.floating)) else v}\n")
    buf.write(",".join(columns) + "\n")
    for row in np.asarray(rows, dtype=float):
        buf.write(",".join(fmt(x) for x in row) + "\n")
    Path(path).write_text(buf.getvalue())


def read_table(path, columns: list[str]) -> tuple[np.ndarray, dict]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(str(path), f"cannot read: {exc.strerror}") from exc
    meta: dict[str, str] = {}
    header = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                meta[key.strip()] = value.strip()
            continue
        if header is None:
            header = [c.strip() for c in line.split(",")]
            if header != columns:
                raise ValidationError(str(path), f"expected columns {columns}, got {header}")
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise ValidationError(str(path), f"line {lineno}: expected {len(columns)} fields")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ValidationError(str(path), f"line {lineno}: {exc}") from exc
    if header is None:
        raise ValidationError(str(path), "missing column header")
    return np.array(rows, dtype=float).reshape(-1, len(columns)), meta


WAVEFORM_COLUMNS = ["t_s", "v_pu", "i_pu"]
SPECTRUM_COLUMNS = ["omega_rad_s", "mag_v", "mag_i"]


def write_waveform(path, w: Waveform, meta: dict | None = None) -> None:
    header = {"T_s": float(w.T_s)}
    header.update(meta or {})
    rows = np.column_stack([w.times, w.samples])
    write_table(path, WAVEFORM_COLUMNS, rows, header)


def read_waveform(path) -> tuple[Waveform, dict]:
    """Read a waveform CSV. Returns the waveform and the raw header dict."""
    rows, meta = read_table(path, WAVEFORM_COLUMNS)
    if "T_s" not in meta:
        raise ValidationError(str(path), "header lacks '# T_s = ...'")
    try:
        T_s = float(meta["T_s"])
    except ValueError as exc:
        raise ValidationError(str(path), f"bad T_s {meta['T_s']!r}") from exc
    if rows.shape[0] < 2:
        raise ValidationError(str(path), f"need at least 2 samples, got {rows.shape[0]}")
    t = rows[:, 0]
    expected = t[0] + T_s * np.arange(t.size)
    if not np.allclose(t, expected, rtol=1e-9, atol=1e-6 * T_s):
        raise ValidationError(str(path), "time column is not uniformly sampled at T_s")
    return Waveform(T_s=T_s, samples=rows[:, 1:], start_time=float(t[0])), meta
