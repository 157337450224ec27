"""Plot-ready CSV files with a commented configuration header.

Numbers are written with 12 significant digits; :func:`quantize` applies the
same rounding in memory so a written file and the arrays it came from can be
compared exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

DIGITS = 12


def fmt(value: float) -> str:
    return format(float(value), f".{DIGITS}g")


def quantize(values) -> np.ndarray:
    return np.array([float(fmt(v)) for v in np.ravel(values)], dtype=float).reshape(np.shape(values))


def write_csv(path, columns: dict, header: dict | None = None) -> Path:
    """Write equal-length ``columns`` (name -> array) after a commented header.

    Single-line header values become ``# key = value``; multi-line values
    (the resolved configuration) become a ``# key:`` line followed by
    indented ``#   line`` comments.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = [np.ravel(columns[n]) for n in names]
    if len({len(d) for d in data}) > 1:
        raise ValueError("columns must have equal length")
    with path.open("w", newline="") as fh:
        for key, value in (header or {}).items():
            lines = str(value).splitlines()
            if len(lines) > 1:
                fh.write(f"# {key}:\n")
                fh.writelines(f"#   {line}\n" for line in lines)
            else:
                fh.write(f"# {key} = {value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([fmt(v) for v in row])
    return path


def read_csv(path) -> tuple[dict, dict]:
    """Return ``(header, columns)`` from a file written by :func:`write_csv`."""
    header, lines, block = {}, [], None
    with Path(path).open() as fh:
        for line in fh:
            if line.startswith("#   ") and block is not None:
                header[block] = "\n".join(filter(None, [header[block], line[4:].rstrip("\n")]))
            elif line.startswith("#"):
                text = line[1:].strip()
                if text.endswith(":") and " = " not in text:
                    block = text[:-1]
                    header[block] = ""
                else:
                    block = None
                    key, _, value = text.partition(" = ")
                    header[key] = value
            elif line.strip():
                lines.append(line)
    reader = csv.reader(lines)
    names = next(reader)
    rows = [[float(v) for v in row] for row in reader]
    arr = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return header, {name: arr[:, i] for i, name in enumerate(names)}
