"""Reading symbol files and model specs; writing reports."""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
import re
import tempfile

import numpy as np

from .entropy import SymbolSequence
from .errors import ExcessEntropyError

__all__ = [
    "InputError",
    "parse_symbols",
    "parse_reals",
    "read_symbols",
    "read_reals",
    "load_json",
    "to_bits",
    "write_atomic",
    "dumps_report",
    "curve_csv",
    "ENTROPY_KEYS",
]

SCHEMA = "excess-entropy/report-v1"

# report fields measured in nats; everything else is dimensionless
ENTROPY_KEYS = frozenset(
    {"H", "h", "E", "Ipf", "D", "h_mu", "h_mu_error", "value", "last", "slope", "S", "F",
     "excess_entropy", "entropy_rate", "stationary_entropy", "b", "b0", "gamma", "n_gamma",
     "expected_slope"}
)

_SPLIT = re.compile(r"[,\s]+")


class InputError(ExcessEntropyError, ValueError):
    """Unreadable or malformed input; the message names the offending location."""


def _locate_bad_token(text, convert):
    for lineno, line in enumerate(text.splitlines(), start=1):
        col = 0
        for tok in line.split(","):
            stripped = tok.strip()
            if stripped:
                try:
                    convert(stripped)
                except ValueError:
                    raise InputError(
                        f"line {lineno}, column {col + tok.index(stripped[0]) + 1}: invalid token {stripped!r}"
                    ) from None
            col += len(tok) + 1
    raise InputError("invalid input")


def _tokens(text):
    body = text.strip()
    return [] if not body else _SPLIT.split(body)


def parse_symbols(text, alphabet_size=None):
    """Newline- or comma-separated nonnegative integers to a SymbolSequence."""
    toks = _tokens(text)
    if not toks:
        raise InputError("input contains no symbols")
    try:
        arr = np.array([int(t) for t in toks], dtype=np.int64)
    except ValueError:
        _locate_bad_token(text, int)
    if arr.min() < 0:
        idx = int(np.argmax(arr < 0))
        raise InputError(f"token {idx + 1}: negative symbol {arr[idx]}")
    A = int(arr.max()) + 1 if alphabet_size is None else int(alphabet_size)
    if arr.max() >= A:
        raise InputError(f"symbol {arr.max()} outside alphabet of size {A}")
    return SymbolSequence(arr, A)


def parse_reals(text):
    toks = _tokens(text)
    if not toks:
        raise InputError("input contains no values")
    try:
        arr = np.array([float(t) for t in toks])
    except ValueError:
        _locate_bad_token(text, float)
    if not np.all(np.isfinite(arr)):
        idx = int(np.argmax(~np.isfinite(arr)))
        raise InputError(f"token {idx + 1}: non-finite value")
    return arr


def _read_bytes(path):
    try:
        if path == "-":
            import sys
            return sys.stdin.buffer.read()
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _decode(data, path):
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: byte {exc.start}: not valid UTF-8") from None


def read_symbols(path, fmt="text", alphabet_size=None):
    """Symbols from a file: ``text`` tokens or raw ``bytes`` (alphabet 256)."""
    data = _read_bytes(path)
    if fmt == "bytes":
        if not data:
            raise InputError(f"{path}: empty file")
        return SymbolSequence(np.frombuffer(data, dtype=np.uint8).astype(np.int64), 256)
    if fmt != "text":
        raise InputError(f"unknown symbol format {fmt!r}")
    return parse_symbols(_decode(data, path), alphabet_size)


def read_reals(path, fmt="text"):
    """Real samples: ``text``/CSV tokens or little-endian 64-bit floats (``f64``)."""
    data = _read_bytes(path)
    if fmt == "f64":
        if len(data) % 8:
            raise InputError(f"{path}: byte {len(data) - len(data) % 8}: truncated 8-byte float")
        arr = np.frombuffer(data, dtype="<f8").astype(float)
        if arr.size == 0:
            raise InputError(f"{path}: empty file")
        if not np.all(np.isfinite(arr)):
            idx = int(np.argmax(~np.isfinite(arr)))
            raise InputError(f"{path}: byte {8 * idx}: non-finite value")
        return arr
    return parse_reals(_decode(data, path))


def load_json(source):
    """Parse a JSON model either inline (starts with ``{``) or from a file path."""
    text = source if source.lstrip().startswith("{") else _decode(_read_bytes(source), source)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def to_bits(obj):
    """Divide every nats-valued field by ``ln 2``; other fields pass through."""
    ln2 = math.log(2.0)

    def conv(value):
        if value is None or isinstance(value, bool):
            return value
        if isinstance(value, (int, float)):
            return value / ln2
        if isinstance(value, list):
            return [conv(v) for v in value]
        return value

    def walk(node):
        if isinstance(node, dict):
            return {k: conv(v) if k in ENTROPY_KEYS else walk(v) for k, v in node.items()}
        if isinstance(node, list):
            return [walk(v) for v in node]
        return node

    return walk(obj)


def _jsonable(node):
    if isinstance(node, dict):
        return {k: _jsonable(v) for k, v in node.items()}
    if isinstance(node, (list, tuple)):
        return [_jsonable(v) for v in node]
    if isinstance(node, np.ndarray):
        return _jsonable(node.tolist())
    if isinstance(node, np.integer):
        return int(node)
    if isinstance(node, np.floating):
        node = float(node)
    if isinstance(node, float) and not math.isfinite(node):
        return None if math.isnan(node) else ("inf" if node > 0 else "-inf")
    return node


def dumps_report(report, unit="nats"):
    report = _jsonable(report)
    if unit == "bits":
        report = to_bits(report)
    report["unit"] = unit
    return json.dumps(report, indent=2) + "\n"


def curve_csv(report, unit="nats"):
    """Plot-ready columns ``n, H, h, E, Ipf, D`` (blank where undefined)."""
    report = _jsonable(report)
    if unit == "bits":
        report = to_bits(report)
    H = report.get("H") or []
    cols = {k: report.get(k) or [] for k in ("h", "E", "Ipf", "D")}
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "H", "h", "E", "Ipf", "D"])
    for n in range(len(H)):
        row = [n, H[n]]
        for k in ("h", "E", "Ipf", "D"):
            seq = cols[k]
            row.append(seq[n - 1] if 1 <= n <= len(seq) else "")
        w.writerow(row)
    return buf.getvalue()


def write_atomic(path, data):
    """Write ``data`` (str or bytes) to ``path`` via a temp file and rename."""
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
