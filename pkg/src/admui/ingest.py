"""Empirical joint distributions from delimited text, and the ``pid-joint v1`` file format.

File format::

    pid-joint v1
    alphabet S <label> <label> ...
    alphabet Y <label> ...
    alphabet Z <label> ...
    p <s-label> <y-label> <z-label> <probability>

Only nonzero cells are listed.  Labels are percent-encoded so they never
contain whitespace; probabilities use 17 significant digits.
"""

from __future__ import annotations

import bisect
import csv
import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import quote, unquote

import numpy as np

from .errors import (
    EmptyAfterFiltering,
    MalformedFile,
    NegativeMass,
    NotNormalized,
    UnknownColumn,
    UnparseableNumeric,
)
from .probkit import Alphabet, JointDistribution, validate_joint

MAGIC = "pid-joint v1"
# printable punctuation that survives str.split(); whitespace and '%' get escaped
_SAFE = "!$&'()*+,-./:;<=>?@[]^_`{|}~"
MISSING = frozenset({"", "?", "NA", "N/A", "nan", "NaN"})


class ColumnKind(str, enum.Enum):
    CATEGORICAL = "categorical"
    BINNED = "binned"


@dataclass(frozen=True)
class ColumnSpec:
    """A column to read; binned columns map numbers through right-open intervals.

    With cut points ``c1 < ... < ck`` the bins are ``(-inf, c1)``,
    ``[c1, c2)``, ..., ``[ck, inf)``, so there are ``k + 1`` labels.
    """

    name: str
    kind: ColumnKind = ColumnKind.CATEGORICAL
    bins: tuple = ()
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ColumnKind(self.kind))
        bins = tuple(float(c) for c in self.bins)
        object.__setattr__(self, "bins", bins)
        if self.kind is ColumnKind.BINNED:
            if not bins or any(hi <= lo for lo, hi in zip(bins, bins[1:])):
                raise ValueError(f"bins for {self.name!r} must be strictly increasing and nonempty")
            labels = tuple(self.labels) or _default_bin_labels(bins)
            if len(labels) != len(bins) + 1 or len(set(labels)) != len(labels):
                raise ValueError(f"{self.name!r} needs {len(bins) + 1} distinct bin labels")
            object.__setattr__(self, "labels", labels)

    def bin_of(self, value: float) -> str:
        return self.labels[bisect.bisect_right(self.bins, value)]


def _fmt(x: float) -> str:
    return f"{x:g}"


def _default_bin_labels(bins) -> tuple:
    labels = [f"<{_fmt(bins[0])}"]
    labels += [f"{_fmt(a)}-{_fmt(b)}" for a, b in zip(bins, bins[1:])]
    labels.append(f">={_fmt(bins[-1])}")
    return tuple(labels)


@dataclass(frozen=True)
class DatasetConfig:
    s_column: ColumnSpec
    y_column: ColumnSpec
    z_column: ColumnSpec
    delimiter: str = ","
    header: bool = True
    missing_policy: str = "DropRow"
    alpha: float = 0.0
    strict_numeric: bool = False

    def __post_init__(self):
        names = {self.s_column.name, self.y_column.name, self.z_column.name}
        if len(names) != 3:
            raise ValueError("S, Y and Z must be three distinct columns")
        if self.missing_policy != "DropRow":
            raise ValueError("only the DropRow missing-data policy is supported")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")


@dataclass
class IngestReport:
    rows_read: int = 0
    rows_dropped: int = 0
    drop_reasons: Counter = field(default_factory=Counter)

    @property
    def rows_kept(self) -> int:
        return self.rows_read - self.rows_dropped


def _column_index(spec: ColumnSpec, header: list | None) -> int:
    if header is not None:
        if spec.name not in header:
            raise UnknownColumn(f"column {spec.name!r} not in header {header}")
        return header.index(spec.name)
    try:
        return int(spec.name)
    except ValueError:
        raise UnknownColumn(f"without a header, columns are addressed by index, got {spec.name!r}") from None


def load_joint_from_table(path, config: DatasetConfig, report: IngestReport | None = None) -> JointDistribution:
    """Empirical pmf of (S, Y, Z) from a delimited file.

    Rows with a missing cell are dropped, as are rows whose binned column
    does not parse as a number (those raise :class:`UnparseableNumeric`
    instead when ``config.strict_numeric`` is set).  ``config.alpha`` adds a
    pseudocount to every cell of the observed alphabet product.
    """
    report = report if report is not None else IngestReport()
    specs = (config.s_column, config.y_column, config.z_column)
    seen = [dict() for _ in specs]  # label -> index, first-appearance order
    for i, spec in enumerate(specs):
        for label in spec.labels:
            seen[i].setdefault(label, len(seen[i]))
    counts = Counter()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=config.delimiter)
        header = None
        if config.header:
            try:
                header = [h.strip() for h in next(reader)]
            except StopIteration:
                raise EmptyAfterFiltering(f"{path} is empty") from None
        cols = [_column_index(spec, header) for spec in specs]
        first_line = 2 if config.header else 1
        for lineno, row in enumerate(reader, start=first_line):
            if not row:
                continue
            report.rows_read += 1
            key = []
            reason = None
            for spec, c in zip(specs, cols):
                cell = row[c].strip() if c < len(row) else ""
                if cell in MISSING:
                    reason = "missing"
                    break
                if spec.kind is ColumnKind.BINNED:
                    try:
                        value = float(cell)
                    except ValueError:
                        if config.strict_numeric:
                            raise UnparseableNumeric(
                                f"line {lineno}: {cell!r} in binned column {spec.name!r}"
                            ) from None
                        reason = "unparseable"
                        break
                    if not math.isfinite(value):
                        reason = "non-finite"
                        break
                    cell = spec.bin_of(value)
                key.append(cell)
            if reason is not None:
                report.rows_dropped += 1
                report.drop_reasons[reason] += 1
                continue
            for i, label in enumerate(key):
                seen[i].setdefault(label, len(seen[i]))
            counts[tuple(key)] += 1
    total = sum(counts.values())
    if total == 0:
        raise EmptyAfterFiltering(f"no usable rows in {path}")
    alphabets = tuple(Alphabet(tuple(d)) for d in seen)
    table = np.full(tuple(a.size for a in alphabets), float(config.alpha))
    for (s, y, z), n in counts.items():
        table[seen[0][s], seen[1][y], seen[2][z]] += n
    return validate_joint(table / table.sum(), alphabets)


def save_joint(dist: JointDistribution, path) -> None:
    Path(path).write_text(format_joint(dist), encoding="utf-8")


def format_joint(dist: JointDistribution) -> str:
    lines = [MAGIC]
    for var, alph in zip("SYZ", dist.alphabets):
        lines.append(" ".join(["alphabet", var] + [quote(l, safe=_SAFE) for l in alph.labels]))
    labels = [[quote(l, safe=_SAFE) for l in a.labels] for a in dist.alphabets]
    for s, y, z in zip(*np.nonzero(dist.pmf)):
        lines.append(f"p {labels[0][s]} {labels[1][y]} {labels[2][z]} {dist.pmf[s, y, z]:.17g}")
    return "\n".join(lines) + "\n"


def load_joint(path) -> JointDistribution:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or text[0].strip() != MAGIC:
        raise MalformedFile(f"missing '{MAGIC}' header", line=1)
    alphabets = {}
    cells = []
    for lineno, line in enumerate(text[1:], start=2):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "alphabet":
            if len(parts) < 3 or parts[1] not in ("S", "Y", "Z") or parts[1] in alphabets:
                raise MalformedFile("bad or duplicate alphabet line", line=lineno)
            try:
                alphabets[parts[1]] = Alphabet(tuple(unquote(l) for l in parts[2:]))
            except ValueError as exc:
                raise MalformedFile(str(exc), line=lineno) from None
        elif parts[0] == "p":
            if len(parts) != 5:
                raise MalformedFile("probability lines need 3 labels and a value", line=lineno)
            try:
                prob = float(parts[4])
            except ValueError:
                raise MalformedFile(f"unparseable probability {parts[4]!r}", line=lineno, position=5) from None
            if not math.isfinite(prob) or prob < 0:
                raise MalformedFile(f"invalid probability {parts[4]!r}", line=lineno, position=5)
            cells.append((lineno, [unquote(l) for l in parts[1:4]], prob))
        else:
            raise MalformedFile(f"unknown record {parts[0]!r}", line=lineno, position=1)
    if set(alphabets) != {"S", "Y", "Z"}:
        raise MalformedFile("alphabet lines for S, Y and Z are required")
    alph = tuple(alphabets[v] for v in "SYZ")
    table = np.zeros(tuple(a.size for a in alph))
    for lineno, labels, prob in cells:
        try:
            idx = tuple(a.index(l) for a, l in zip(alph, labels))
        except ValueError:
            raise MalformedFile(f"label not in alphabet: {labels}", line=lineno) from None
        table[idx] += prob
    try:
        return validate_joint(table, alph)
    except (NegativeMass, NotNormalized) as exc:
        raise MalformedFile(str(exc)) from None
