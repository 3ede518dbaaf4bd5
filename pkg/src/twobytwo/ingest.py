"""Reading count tables and building per-pair tables from transactions.

Tables CSV
    Header ``id,n11,n10,n01,n00``; one table per row, integer counts.  Ids
    must not contain commas.

Transactions file
    UTF-8, one record per line: ``id<TAB>a1;a2;...<TAB>b1;b2;...``.  Either
    item list may be empty.  Items are matched as exact, case-sensitive
    strings.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field

from .exceptions import NegativeCount, ParseError
from .tables import CountTable2x2

TABLES_HEADER = ("id", "n11", "n10", "n01", "n00")


@dataclass(frozen=True)
class TransactionRecord:
    id: str
    items_a: frozenset = field(default_factory=frozenset)
    items_b: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.id:
            raise ValueError("record id must be non-empty")


@dataclass
class PairDataset:
    """2x2 count tables keyed by ``(item_a, item_b)``; every table totals ``n_reports``."""

    pairs: dict
    n_reports: int

    def __len__(self):
        return len(self.pairs)

    def items(self):
        """Pairs in sorted key order."""
        return sorted(self.pairs.items())

    def labelled(self):
        """``[(label, table)]`` with ``label = "a|b"``."""
        return [(f"{a}|{b}", table) for (a, b), table in self.items()]


def _read_lines(path):
    # newline="" keeps "\r\n" intact so it can be stripped per line
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read().splitlines()


def _parse_count(text, lineno, name):
    try:
        value = int(text.strip())
    except ValueError:
        raise ParseError(f"{name}={text!r} is not an integer", lineno) from None
    if value < 0:
        raise NegativeCount(f"{name}={value} is negative", lineno)
    return value


def parse_tables_csv(text):
    """Parse tables-CSV content; see :func:`load_tables_csv`."""
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    reader = csv.reader(lines)
    header = tuple(h.strip() for h in next(reader))
    if header != TABLES_HEADER:
        raise ParseError(f"expected header {','.join(TABLES_HEADER)}, got {','.join(header)}", 1)
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 5:
            raise ParseError(f"expected 5 fields, got {len(row)}", lineno)
        ident = row[0].strip()
        if not ident:
            raise ParseError("empty id", lineno)
        n11, n10, n01, n00 = (_parse_count(v, lineno, k) for k, v in zip(TABLES_HEADER[1:], row[1:]))
        out.append((ident, CountTable2x2(n00=n00, n01=n01, n10=n10, n11=n11)))
    return out


def load_tables_csv(path):
    """Return ``[(id, CountTable2x2)]`` in file order."""
    return parse_tables_csv("\n".join(_read_lines(path)))


def format_tables_csv(tables):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLES_HEADER)
    for ident, t in tables:
        writer.writerow((ident, t.n11, t.n10, t.n01, t.n00))
    return buf.getvalue()


def write_tables_csv(path, tables):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_tables_csv(tables))


def _split_items(text):
    return frozenset(item for item in text.split(";") if item)


def parse_transactions(lines):
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(f"expected 3 tab-separated fields, got {len(parts)}", lineno)
        ident = parts[0].strip()
        if not ident:
            raise ParseError("empty record id", lineno)
        records.append(TransactionRecord(ident, _split_items(parts[1]), _split_items(parts[2])))
    return records


def load_transactions(path):
    return parse_transactions(_read_lines(path))


def build_pair_dataset(records, min_n11=1):
    """Count a 2x2 table for every (a, b) pair co-occurring at least ``min_n11`` times."""
    count_a, count_b, joint = Counter(), Counter(), Counter()
    n_reports = 0
    for rec in records:
        n_reports += 1
        count_a.update(rec.items_a)
        count_b.update(rec.items_b)
        joint.update((a, b) for a in rec.items_a for b in rec.items_b)
    pairs = {}
    for (a, b), n11 in joint.items():
        if n11 < max(min_n11, 1):
            continue
        n10 = count_a[a] - n11
        n01 = count_b[b] - n11
        pairs[(a, b)] = CountTable2x2(n00=n_reports - n11 - n10 - n01, n01=n01, n10=n10, n11=n11)
    return PairDataset(pairs=dict(sorted(pairs.items())), n_reports=n_reports)
