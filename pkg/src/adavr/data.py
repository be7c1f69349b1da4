"""Dataset ingestion (LIBSVM text) and synthetic problem generation.

The accepted format is one example per line, ``<label> <idx>:<val> ...`` with
1-based strictly increasing feature indices; ``#`` starts a comment running to
the end of the line. Labels must be integers. {+1,-1} are kept as is, {0,1}
maps to {-1,+1} and {1,2} maps to {+1,-1}; any other combination is rejected.
Parsing is single-pass per file and reports errors with line numbers.
"""

from __future__ import annotations

import gzip
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .problem import LabeledDataset

__all__ = [
    "ParseError",
    "ParseReport",
    "parse_libsvm",
    "load_libsvm",
    "dumps_libsvm",
    "synth_classification",
]


class ParseError(ValueError):
    """Malformed input; ``line`` is the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class ParseReport:
    n_rows: int
    n_features: int
    n_skipped_comments: int
    label_mapping_applied: bool


# recognized raw label alphabets, in priority order, with their mapping to +-1
_LABEL_SETS = (
    ({-1, 1}, {-1: -1.0, 1: 1.0}),
    ({0, 1}, {0: -1.0, 1: 1.0}),
    ({1, 2}, {1: 1.0, 2: -1.0}),
)


def _parse_label(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        # tolerate integral floats such as "1.0"
        try:
            f = float(tok)
        except ValueError:
            raise ParseError(lineno, f"malformed label {tok!r}") from None
        if f != int(f):
            raise ParseError(lineno, f"label {tok!r} is not an integer") from None
        return int(f)


def parse_libsvm(source: str | TextIO | Iterable[str],
                 min_dim: int = 0) -> tuple[LabeledDataset, ParseReport]:
    """Parse LIBSVM text into a dataset plus a parse report.

    ``min_dim`` can raise the feature dimension above the maximum seen index
    (datasets in a family may differ in their trailing features).
    """
    if isinstance(source, str):
        source = io.StringIO(source)

    raw_labels: list[int] = []
    indptr = [0]
    indices: list[int] = []
    values: list[float] = []
    n_comments = 0
    max_index = 0
    candidates = list(_LABEL_SETS)

    for lineno, line in enumerate(source, start=1):
        had_comment = "#" in line
        line = line.split("#", 1)[0].strip()
        if not line:
            if had_comment:
                n_comments += 1
            continue
        toks = line.split()
        label = _parse_label(toks[0], lineno)
        candidates = [(alpha, table) for alpha, table in candidates if label in alpha]
        if not candidates:
            seen = sorted(set(raw_labels) | {label})
            raise ParseError(lineno, f"unrecognized label set {seen}")
        raw_labels.append(label)
        prev_idx = 0
        for tok in toks[1:]:
            pair = tok.split(":")
            if len(pair) != 2:
                raise ParseError(lineno, f"malformed feature token {tok!r}")
            try:
                idx = int(pair[0])
                val = float(pair[1])
            except ValueError:
                raise ParseError(lineno, f"malformed feature token {tok!r}") from None
            if idx < 1:
                raise ParseError(lineno, f"feature index {idx} must be >= 1")
            if idx <= prev_idx:
                raise ParseError(lineno, "feature indices not strictly increasing")
            if not np.isfinite(val):
                raise ParseError(lineno, f"non-finite feature value {pair[1]!r}")
            prev_idx = idx
            indices.append(idx - 1)
            values.append(val)
            max_index = max(max_index, idx)
        indptr.append(len(indices))

    if not raw_labels:
        raise ParseError(0, "no data rows")

    mapping = candidates[0][1]
    mapped = mapping is not _LABEL_SETS[0][1]

    d = max(max_index, min_dim, 1)
    ds = LabeledDataset(
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int64),
        np.asarray(values, dtype=np.float64),
        np.asarray([mapping[lab] for lab in raw_labels], dtype=np.float64),
        d,
    )
    return ds, ParseReport(ds.n, d, n_comments, mapped)


def load_libsvm(path: str | Path, min_dim: int = 0) -> tuple[LabeledDataset, ParseReport]:
    """Parse a LIBSVM file; transparently decompresses ``.gz`` paths."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8") as fh:
        return parse_libsvm(fh, min_dim=min_dim)


def dumps_libsvm(ds: LabeledDataset) -> str:
    """Serialize back to LIBSVM text (1-based indices, round-trip exact values)."""
    lines = []
    for i in range(ds.n):
        idx, val = ds.row(i)
        parts = [f"{int(ds.labels[i]):+d}"]
        parts += [f"{j + 1}:{v:.17g}" for j, v in zip(idx, val)]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def synth_classification(n: int, d: int, seed: int) -> LabeledDataset:
    """Random unit-norm gaussian rows labeled by a noisy hidden halfspace."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    X = rng.standard_normal((n, d))
    norms = np.linalg.norm(X, axis=1)
    norms[norms == 0.0] = 1.0
    X /= norms[:, None]
    w = rng.standard_normal(d)
    margins = X @ w + 0.1 * rng.standard_normal(n)
    y = np.where(margins >= 0.0, 1.0, -1.0)
    return LabeledDataset.from_dense(X, y)
