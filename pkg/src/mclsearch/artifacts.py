"""On-disk formats: atomic writes, reports with key=value sidecars, seed files."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Mapping, Sequence

CHECKSUM_TAG = "# lines-checksum"


def atomic_write(path: str | os.PathLike, text: str) -> Path:
    """Write via a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def format_table(columns: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    """Fixed column order, right-aligned, header prefixed with ``#``."""
    cells = [[str(c) for c in columns]] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    out = []
    for k, r in enumerate(cells):
        line = "  ".join(x.rjust(w) for x, w in zip(r, widths))
        out.append(("# " if k == 0 else "  ") + line)
    return "\n".join(out) + "\n"


def format_kv(values: Mapping[str, object]) -> str:
    return "".join(f"{k}={_kv(v)}\n" for k, v in values.items())


def _kv(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(map(str, v))
    return str(v)


def parse_kv(text: str) -> dict[str, str]:
    out = {}
    for ln in text.splitlines():
        if ln.strip() and not ln.startswith("#"):
            k, _, v = ln.partition("=")
            out[k.strip()] = v.strip()
    return out


def write_report(out_dir: str | os.PathLike, name: str, columns: Sequence[str],
                 rows: Sequence[Sequence[object]], values: Mapping[str, object]) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    a = atomic_write(out_dir / f"{name}.txt", format_table(columns, rows))
    b = atomic_write(out_dir / f"{name}.kv", format_kv(values))
    return a, b


def with_checksum(text: str, checksum: str) -> str:
    return f"{CHECKSUM_TAG} {checksum}\n" + text


def read_checksum(text: str) -> str | None:
    for ln in text.splitlines():
        if ln.startswith(CHECKSUM_TAG + " "):
            return ln.split()[2]
    return None


class ChecksumMismatch(ValueError):
    pass


def require_checksum(text: str, expected: str, what: str = "file") -> None:
    got = read_checksum(text)
    if got is not None and got != expected:
        raise ChecksumMismatch(f"{what} refers to lines with checksum {got}, have {expected}")


def format_seed(p1: int, p2: int, b1: Sequence[int], b2: Sequence[int], checksum: str | None = None) -> str:
    text = f"{p1} {p2}\n" + " ".join(map(str, b1)) + "\n" + " ".join(map(str, b2)) + "\n"
    return with_checksum(text, checksum) if checksum else text


def parse_seed(text: str) -> tuple[int, int, tuple[int, ...], tuple[int, ...]]:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if len(rows) != 3 or len(rows[0]) != 2 or len(rows[1]) != 28 or len(rows[2]) != 28:
        raise ValueError("seed file needs a 'p1 p2' header and two rows of 28 line ids")
    p1, p2 = map(int, rows[0])
    return p1, p2, tuple(map(int, rows[1])), tuple(map(int, rows[2]))
