"""Text formats: code specs, codewords, messages, soft inputs and CSV tables.

CSV outputs start with ``#`` metadata lines (tool, version, parameters,
seed); readers skip them.  Floats are written with 17 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path as FsPath
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import __version__
from .codebook import CodeSpec, Path, as_path
from .channel import CompoundBsc, MERGE_TOL, moments_along_path

__all__ = [
    "fmt",
    "metadata_lines",
    "write_csv",
    "read_csv",
    "dump_spec",
    "load_spec",
    "dump_codeword",
    "load_codeword",
    "dump_message",
    "load_message",
    "dump_soft",
    "load_soft",
    "dump_compound",
    "load_compound",
    "trajectory_rows",
    "write_text",
    "FormatError",
]


class FormatError(ValueError):
    """Malformed input file; the message names the offending line."""


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    if x is None:
        return ""
    return str(x)


def metadata_lines(command: str, params: Mapping, seed: int | None = None) -> list[str]:
    lines = [f"# tool=polarmoments version={__version__} command={command}"]
    lines.append("# params=" + json.dumps(params, sort_keys=True, default=fmt))
    if seed is not None:
        lines.append(f"# seed={seed}")
    return lines


def write_csv(
    header: Sequence[str], rows: Iterable[Sequence], meta: Sequence[str] = ()
) -> str:
    buf = io.StringIO()
    for line in meta:
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    body = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(body))


def dump_spec(spec: CodeSpec, meta: Mapping | None = None) -> str:
    doc: dict = {"m": spec.m, "info_paths": [str(p) for p in spec.paths]}
    if meta:
        doc["meta"] = dict(meta)
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def load_spec(text: str) -> CodeSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"spec file, line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "m" not in doc or "info_paths" not in doc:
        raise FormatError("spec file needs fields 'm' and 'info_paths'")
    m = doc["m"]
    if not isinstance(m, int):
        raise FormatError(f"spec field 'm' must be an integer, got {m!r}")
    try:
        return CodeSpec.from_paths(m, doc["info_paths"])
    except ValueError as exc:
        raise FormatError(f"spec file: {exc}") from None


def dump_codeword(c: np.ndarray) -> str:
    return "".join(str(int(b)) for b in np.asarray(c).ravel()) + "\n"


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def load_codeword(text: str) -> np.ndarray:
    lines = list(_content_lines(text))
    if len(lines) != 1:
        raise FormatError(f"codeword file must hold exactly one line of bits, found {len(lines)}")
    lineno, line = lines[0]
    if set(line) - {"0", "1"}:
        raise FormatError(f"line {lineno}: codeword may contain only '0' and '1'")
    return np.array([int(ch) for ch in line], dtype=np.uint8)


def dump_message(msg: Mapping[Path, int]) -> str:
    return "".join(f"{p} {int(b)}\n" for p, b in sorted(msg.items()))


def load_message(text: str) -> dict[Path, int]:
    """Rows ``<path> <bit>``."""
    out: dict[Path, int] = {}
    for lineno, line in _content_lines(text):
        parts = line.split()
        if len(parts) != 2 or parts[1] not in ("0", "1"):
            raise FormatError(f"line {lineno}: expected '<path> <bit>', got {line!r}")
        try:
            p = as_path(parts[0])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        if p in out:
            raise FormatError(f"line {lineno}: duplicate path {p}")
        out[p] = int(parts[1])
    return out


def dump_soft(llr: np.ndarray) -> str:
    return "".join(fmt(float(v)) + "\n" for v in np.asarray(llr).ravel())


def load_soft(text: str) -> np.ndarray:
    """One log-likelihood per line; ``inf`` and ``-inf`` are allowed."""
    vals = []
    for lineno, line in _content_lines(text):
        try:
            v = float(line)
        except ValueError:
            raise FormatError(f"line {lineno}: not a number: {line!r}") from None
        if math.isnan(v):
            raise FormatError(f"line {lineno}: NaN is not a log-likelihood")
        vals.append(v)
    return np.array(vals, dtype=float)


def dump_compound(W: CompoundBsc) -> str:
    head = f"# compound BSC, merge_tol={MERGE_TOL:g}\n"
    return head + "".join(f"{fmt(b)} {fmt(e)}\n" for b, e in W.components())


def load_compound(text: str) -> CompoundBsc:
    comps = []
    for lineno, line in _content_lines(text):
        parts = line.split()
        try:
            beta, eps = (float(x) for x in parts)
        except ValueError:
            raise FormatError(f"line {lineno}: expected 'beta epsilon', got {line!r}") from None
        comps.append((beta, eps))
    try:
        return CompoundBsc.from_components(comps)
    except ValueError as exc:
        raise FormatError(f"compound channel: {exc}") from None


TRAJECTORY_HEADER = ("path", "step", "bit", "B", "A", "Z_upper", "Z_lower")


def trajectory_rows(b0: float, xi: Path | str):
    """Rows for the trajectory CSV; Z is sandwiched between B and sqrt(B)."""
    xi = as_path(xi)
    traj = moments_along_path(b0, xi)
    for step, b in enumerate(traj):
        bit = "" if step == 0 else xi.bits[step - 1]
        yield (str(xi), step, bit, b, 1.0 - b, math.sqrt(b), b)


def write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        FsPath(path).write_text(text)
