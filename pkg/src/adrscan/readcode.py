"""Read code parsing, level-k aggregation keys and the code dictionary.

A THIN-style medcode is a 5-character Read stem (dot padded) followed by an
optional term suffix, e.g. ``N245.16`` = stem ``N245.`` + suffix ``16``.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, TextIO

from .errors import EmptyToken, MalformedRow, MissingHeader, TokenContainsWhitespace

log = logging.getLogger(__name__)

STEM_LENGTH = 5
UNKNOWN_DESCRIPTION = "<unknown>"


class LevelMode(str, Enum):
    FULL = "full"  # group by full raw code ("level 1-5")
    LEVEL3 = "level3"  # group by 3-character stem prefix ("level 1-3")

    @classmethod
    def from_level(cls, level: int) -> "LevelMode":
        if level == 5:
            return cls.FULL
        if level == 3:
            return cls.LEVEL3
        raise ValueError(f"level must be 5 or 3, got {level}")


@dataclass(frozen=True)
class ReadCode:
    raw: str
    stem: str
    term_suffix: str

    @property
    def level(self) -> int:
        return stem_level(self.stem)

    def __str__(self) -> str:
        return self.raw


def stem_level(stem: str) -> int:
    dot = stem.find(".")
    return len(stem) if dot < 0 else dot


def parse_code(token: str) -> ReadCode:
    if not token:
        raise EmptyToken("empty Read code")
    if any(ch.isspace() for ch in token):
        raise TokenContainsWhitespace(f"Read code contains whitespace: {token!r}")
    return ReadCode(raw=token, stem=token[:STEM_LENGTH], term_suffix=token[STEM_LENGTH:])


def key_at_level(code: ReadCode | str, k: int) -> str:
    """Aggregation key for ``code`` at hierarchy depth ``k``.

    Codes shallower than ``k`` keep their full raw form so they never merge
    into a sibling's bucket.
    """
    if not 1 <= k <= 5:
        raise ValueError(f"level must be in 1..5, got {k}")
    if isinstance(code, str):
        code = parse_code(code)
    if code.level >= k:
        return code.stem[:k]
    return code.raw


def aggregation_key(code: ReadCode | str, mode: LevelMode) -> str:
    if mode is LevelMode.FULL:
        return code if isinstance(code, str) else code.raw
    return key_at_level(code, 3)


@dataclass
class CodeDictionary:
    entries: dict[str, str] = field(default_factory=dict)
    duplicate_count: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, code: str) -> bool:
        return code in self.entries

    def lookup(self, code: str) -> str:
        return self.entries.get(code, UNKNOWN_DESCRIPTION)

    def describe(self, key: str) -> str:
        """Description for an aggregation key.

        Level-3 keys such as ``N24`` are looked up directly, then under the
        conventional padded form ``N24..00``.
        """
        if key in self.entries:
            return self.entries[key]
        if len(key) < STEM_LENGTH:
            padded = key.ljust(STEM_LENGTH, ".")
            for candidate in (padded + "00", padded):
                if candidate in self.entries:
                    return self.entries[candidate]
        return UNKNOWN_DESCRIPTION


def sniff_delimiter(header_line: str) -> str:
    return "\t" if "\t" in header_line else ","


def read_table(stream: TextIO, required: Iterable[str]):
    """Yield ``(line_number, row_dict)`` for a CSV/TSV stream.

    The delimiter is taken from the header line; unknown columns are ignored.
    An entirely empty stream yields nothing.
    """
    required = tuple(required)
    header_line = stream.readline()
    if not header_line:
        return
    delimiter = sniff_delimiter(header_line)
    header = next(csv.reader(io.StringIO(header_line), delimiter=delimiter))
    header = [h.strip().lstrip("﻿") for h in header]
    missing = [c for c in required if c not in header]
    if missing:
        raise MissingHeader(missing)
    idx = {name: header.index(name) for name in required}
    reader = csv.reader(stream, delimiter=delimiter)
    for row in reader:
        line = reader.line_num + 1
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) < len(header):
            raise MalformedRow(line, f"expected {len(header)} fields, got {len(row)}")
        yield line, {name: row[i].strip() for name, i in idx.items()}


def load_dictionary(stream: TextIO) -> CodeDictionary:
    d = CodeDictionary()
    for line, row in read_table(stream, ("code", "description")):
        code = row["code"]
        if not code:
            raise MalformedRow(line, "empty code")
        if code in d.entries:
            d.duplicate_count += 1
            continue
        d.entries[code] = row["description"]
    log.info("loaded %d dictionary entries (%d duplicates ignored)", len(d), d.duplicate_count)
    return d
