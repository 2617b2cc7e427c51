"""Shared helpers: deterministic parallel map and CSV emission."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor


def ordered_map(fn, tasks, workers: int = 1) -> list:
    """Map fn over tasks, results in task order regardless of scheduling.

    workers = 1 runs serially in-process.  Tasks carry their own seeds, so
    the results (and anything serialized from them) are identical for any
    worker count.
    """
    if workers < 1:
        raise ValueError("worker count must be >= 1")
    if workers == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def fmt(value) -> str:
    """Stable cell formatting: shortest round-trip repr for floats."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int,)):
        return str(value)
    return repr(float(value))


def write_csv(path: str, header_obj: dict, columns: list[str], rows) -> None:
    """CSV with an embedded JSON config line: `# {...}` then header then rows.

    Comma separated, `.` decimal via repr, LF line endings.
    """
    with open(path, "w", newline="") as f:
        f.write("# " + json.dumps(header_obj, sort_keys=True) + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def read_csv(path: str):
    """Inverse of write_csv: (header dict, column names, list of row lists)."""
    with open(path, "r", newline="") as f:
        first = f.readline()
        header_obj = json.loads(first.lstrip("# ").strip()) if first.startswith("#") else {}
        reader = csv.reader(f)
        columns = next(reader)
        rows = [row for row in reader]
    return header_obj, columns, rows
