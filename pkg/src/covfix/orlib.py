"""
OR-Library "scp" files and UB sidecar tables.

The scp layout is a stream of whitespace-separated numbers: ``m n``, the ``n`` column costs, then
for every row its column count followed by that many 1-based column indices. Line breaks carry no
meaning.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterator, Mapping

from .errors import CovfixError
from .instance import ScpInstance, validate

logger = logging.getLogger(__name__)

__all__ = [
    "DuplicateName",
    "MalformedLine",
    "MalformedToken",
    "NonPositiveUb",
    "TrailingGarbage",
    "Truncated",
    "UbTable",
    "format_ub_table",
    "load_instance",
    "load_ub_table",
    "parse_orlib",
    "parse_ub_table",
    "save_instance",
    "write_orlib",
]

_WRAP = 12


class OrlibError(CovfixError):
    """The text is not a valid OR-Library file."""


class Truncated(OrlibError):
    """The token stream ended early."""

    def __init__(self, expected: str, position: int):
        super().__init__(f"input ended at token {position} while reading {expected}")
        self.expected = expected
        self.position = position


class TrailingGarbage(OrlibError):
    """Tokens follow the last row."""

    def __init__(self, token: str, position: int):
        super().__init__(f"unexpected token {token!r} at position {position} after the last row")
        self.token = token
        self.position = position


class MalformedToken(OrlibError):
    """A token does not have the expected numeric type."""

    def __init__(self, token: str, position: int, expected: str):
        super().__init__(f"token {position} ({token!r}) is not {expected}")
        self.token = token
        self.position = position


class UbTableError(CovfixError):
    """The UB sidecar is invalid."""


class MalformedLine(UbTableError):
    """A line is not ``name value``."""

    def __init__(self, line_number: int, line: str):
        super().__init__(f"line {line_number}: expected 'name value', got {line!r}")
        self.line_number = line_number
        self.line = line


class DuplicateName(UbTableError):
    """An instance name appears twice."""

    def __init__(self, name: str, line_number: int):
        super().__init__(f"line {line_number}: duplicate entry for {name!r}")
        self.name = name
        self.line_number = line_number


class NonPositiveUb(UbTableError):
    """An upper bound is zero or negative."""

    def __init__(self, name: str, value: float):
        super().__init__(f"upper bound for {name!r} must be positive, got {value!r}")
        self.name = name
        self.value = value


UbTable = Mapping[str, float]


class _Tokens:
    def __init__(self, text: str):
        self._tokens = text.split()
        self.position = 0

    def __iter__(self) -> Iterator[str]:
        return iter(self._tokens[self.position :])

    def take(self, expected: str) -> str:
        if self.position >= len(self._tokens):
            raise Truncated(expected, self.position)
        token = self._tokens[self.position]
        self.position += 1
        return token

    def take_int(self, expected: str) -> int:
        token = self.take(expected)
        try:
            return int(token)
        except ValueError:
            raise MalformedToken(token, self.position - 1, "an integer") from None

    def take_number(self, expected: str) -> float:
        token = self.take(expected)
        try:
            return float(token)
        except ValueError:
            raise MalformedToken(token, self.position - 1, "a number") from None


def parse_orlib(text: str) -> ScpInstance:
    """Parse an OR-Library scp instance."""
    tokens = _Tokens(text)
    n_rows = tokens.take_int("the row count")
    n_cols = tokens.take_int("the column count")
    cost = [tokens.take_number(f"cost {j + 1}") for j in range(n_cols)]
    rows: list[list[int]] = []
    for i in range(n_rows):
        count = tokens.take_int(f"the size of row {i + 1}")
        rows.append([tokens.take_int(f"row {i + 1}") - 1 for _ in range(count)])
    for token in tokens:
        raise TrailingGarbage(token, tokens.position)
    return validate(n_rows, n_cols, cost, rows)


def write_orlib(inst: ScpInstance) -> str:
    """Serialize an instance in the OR-Library scp layout."""
    lines = [f"{inst.n_rows} {inst.n_cols}"]
    lines += _wrapped(_format_cost(value, inst.integral) for value in inst.cost)
    for row in inst.rows:
        lines.append(str(len(row)))
        lines += _wrapped(str(j + 1) for j in row)
    return "\n".join(lines) + "\n"


def load_instance(path: Path) -> ScpInstance:
    logger.debug("Reading %s", path)
    return parse_orlib(path.read_text(encoding="utf8"))


def save_instance(inst: ScpInstance, path: Path) -> None:
    path.write_text(write_orlib(inst), encoding="utf8")


def parse_ub_table(text: str) -> dict[str, float]:
    """Parse ``name value`` lines; blank lines and ``#`` comments are skipped."""
    table: dict[str, float] = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedLine(line_number, raw)
        name, token = parts
        try:
            value = float(token)
        except ValueError:
            raise MalformedLine(line_number, raw) from None
        if name in table:
            raise DuplicateName(name, line_number)
        if not value > 0:
            raise NonPositiveUb(name, value)
        table[name] = value
    return table


def load_ub_table(path: Path) -> dict[str, float]:
    return parse_ub_table(path.read_text(encoding="utf8"))


def format_ub_table(table: UbTable) -> str:
    return "".join(
        f"{name} {_format_cost(value, float(value).is_integer())}\n"
        for name, value in table.items()
    )


def _format_cost(value: float, integral: bool) -> str:
    return str(int(value)) if integral else repr(value)


def _wrapped(tokens: Iterator[str]) -> list[str]:
    items = list(tokens)
    return [" ".join(items[k : k + _WRAP]) for k in range(0, len(items), _WRAP)]
