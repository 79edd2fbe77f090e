"""Input parsing: group/value CSV files and pre-ranked label sequences."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Iterable

from .errors import InputDataError
from .groups import Arrangement, GroupSizes, arrangement_from_data, group_label_order


@dataclass(frozen=True)
class IngestResult:
    """Parsed input: label names plus the derived sizes and arrangement."""

    labels: tuple[str, ...]
    sizes: GroupSizes
    arrangement: Arrangement


def read_records(stream: Iterable[str]) -> list[tuple[str, Decimal]]:
    """Parse `group,value` CSV rows into (label, Decimal) records.

    Values are kept as Decimal so that tie detection uses exact equality of
    the written numbers.  Blank lines are ignored; malformed rows raise with
    their line number.
    """
    reader = csv.reader(stream)
    header = None
    records: list[tuple[str, Decimal]] = []
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        if header is None:
            header = [cell.strip().lstrip("﻿").lower() for cell in row]
            if header != ["group", "value"]:
                raise InputDataError(
                    f"line {reader.line_num}: expected header 'group,value', got "
                    f"{','.join(header)!r}"
                )
            continue
        if len(row) != 2:
            raise InputDataError(
                f"line {reader.line_num}: expected 2 fields, got {len(row)}"
            )
        label = row[0].strip()
        if not label:
            raise InputDataError(f"line {reader.line_num}: empty group label")
        try:
            value = Decimal(row[1].strip())
        except InvalidOperation as exc:
            raise InputDataError(
                f"line {reader.line_num}: {row[1].strip()!r} is not a number"
            ) from exc
        if value.is_nan():
            raise InputDataError(f"line {reader.line_num}: value is NaN")
        records.append((label, value))
    if header is None:
        raise InputDataError("empty input: no 'group,value' header found")
    if not records:
        raise InputDataError("no data rows after the header")
    return records


def ingest_csv(stream: Iterable[str]) -> IngestResult:
    records = read_records(stream)
    sizes, arrangement = arrangement_from_data(records)
    labels = tuple(str(lab) for lab in group_label_order(records))
    return IngestResult(labels, sizes, arrangement)


def parse_pre_ranked(text: str) -> IngestResult:
    """Parse a whitespace-separated label sequence with parenthesized ties.

    Example: ``a a (a c) c b`` puts the third and fourth observations in one
    tie-block.  Labels map to group indices in first-appearance order.
    """
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    blocks: list[list[str]] = []
    current: list[str] | None = None
    for tok in tokens:
        if tok == "(":
            if current is not None:
                raise InputDataError("nested '(' in pre-ranked input")
            current = []
        elif tok == ")":
            if current is None:
                raise InputDataError("unmatched ')' in pre-ranked input")
            if not current:
                raise InputDataError("empty tie group '()' in pre-ranked input")
            blocks.append(current)
            current = None
        else:
            if current is None:
                blocks.append([tok])
            else:
                current.append(tok)
    if current is not None:
        raise InputDataError("unclosed '(' in pre-ranked input")
    if not blocks:
        raise InputDataError("empty pre-ranked input")
    index: dict[str, int] = {}
    for block in blocks:
        for lab in block:
            if lab not in index:
                index[lab] = len(index)
    counts = [0] * len(index)
    for block in blocks:
        for lab in block:
            counts[index[lab]] += 1
    sizes = GroupSizes(tuple(counts))
    arrangement = Arrangement(
        tuple(tuple(index[lab] for lab in block) for block in blocks)
    )
    return IngestResult(tuple(index), sizes, arrangement)


def ingest_path(path: str, pre_ranked: bool = False) -> IngestResult:
    """Read a file (or '-' for stdin) in either input format."""
    import sys

    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputDataError(f"cannot read {path}: {exc}") from exc
    if pre_ranked:
        return parse_pre_ranked(text)
    return ingest_csv(io.StringIO(text))
