"""File reading operations for qri.

This module reads the two CSV inputs of the command line tool: single-column
income files and ``lower,upper,count`` grouped tables.
"""

import io
from pathlib import Path
from typing import TYPE_CHECKING, Final

import numpy as np
import pandas as pd

from ._exceptions import FileError, ParseError

if TYPE_CHECKING:
    from ._types import FloatArray

__all__ = [
    "BIN_COLUMNS",
    "parse_bins_frame",
    "parse_incomes",
    "read_bins_frame",
    "read_incomes",
]

BIN_COLUMNS: Final[tuple[str, str, str]] = ("lower", "upper", "count")
"""Column names of a grouped table, in order."""


def _read_text(path: Path | str) -> str:
    file_path = Path(path) if isinstance(path, str) else path
    try:
        return file_path.read_text(encoding="utf-8-sig")
    except OSError as e:
        msg = f"cannot read file: {e}"
        raise FileError(msg) from e
    except UnicodeDecodeError as e:
        msg = f"invalid UTF-8: {e}"
        raise ParseError(msg) from e


def _is_number(text: str) -> bool:
    try:
        _ = float(text)
    except ValueError:
        return False
    return True


def parse_incomes(text: str) -> "FloatArray":
    """Parse single-column CSV text of incomes.

    A first line that is not a number is treated as a header. Empty input
    gives an empty array; the estimators reject it downstream.

    Raises:
        ParseError: If a row has more than one column or a value is not a
            number.
    """
    if not text.strip():
        return np.empty(0, dtype=np.float64)
    try:
        frame = pd.read_csv(io.StringIO(text), header=None, dtype=str)
    except pd.errors.ParserError as e:
        msg = f"invalid CSV: {e}"
        raise ParseError(msg) from e
    if frame.shape[1] != 1:
        msg = f"expected a single column of incomes, got {frame.shape[1]} columns"
        raise ParseError(msg)

    column = frame.iloc[:, 0].str.strip()
    if not column.empty and not _is_number(column.iloc[0]):
        column = column.iloc[1:]
    values = pd.to_numeric(column, errors="coerce")
    bad = values.isna() & column.notna()
    if bool(bad.any()):
        row = int(bad.to_numpy().argmax()) + 1
        msg = f"value {column[bad].iloc[0]!r} in row {row} is not a number"
        raise ParseError(msg)
    return values.dropna().to_numpy(dtype=np.float64)


def read_incomes(path: Path | str) -> "FloatArray":
    """Read a single-column CSV file of incomes (header optional).

    Raises:
        FileError: If the file cannot be read.
        ParseError: If the content is not a single numeric column.
    """
    return parse_incomes(_read_text(path))


def parse_bins_frame(text: str) -> pd.DataFrame:
    """Parse ``lower,upper,count`` CSV text into a numeric frame.

    The header row is optional; without one the columns are taken in
    ``lower,upper,count`` order. An empty ``upper`` marks the unbounded top
    bin and becomes NaN.

    Raises:
        ParseError: If a column is missing or a value is not a number.
    """
    try:
        frame = pd.read_csv(
            io.StringIO(text), header=None, dtype=str, skipinitialspace=True
        )
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        msg = f"invalid grouped table: {e}"
        raise ParseError(msg) from e
    names = [str(cell).strip().lower() for cell in frame.iloc[0]]
    if _is_number(names[0]):
        extra = [f"column_{i}" for i in range(len(BIN_COLUMNS), len(names))]
        names = [*BIN_COLUMNS, *extra][: len(names)]
    else:
        frame = frame.iloc[1:].copy()
    frame.columns = pd.Index(names)
    missing = [name for name in BIN_COLUMNS if name not in frame.columns]
    if missing:
        msg = f"grouped table is missing column(s): {', '.join(missing)}"
        raise ParseError(msg)

    frame = frame.loc[:, list(BIN_COLUMNS)].copy()
    for name in BIN_COLUMNS:
        converted = pd.to_numeric(frame[name], errors="coerce")
        if bool((converted.isna() & frame[name].notna()).any()):
            msg = f"column {name!r} contains a value that is not a number"
            raise ParseError(msg)
        frame[name] = converted.astype(np.float64)
    if bool(frame["lower"].isna().any()) or bool(frame["count"].isna().any()):
        msg = "every bin needs a lower bound and a count"
        raise ParseError(msg)
    return frame


def read_bins_frame(path: Path | str) -> pd.DataFrame:
    """Read a ``lower,upper,count`` CSV file.

    Raises:
        FileError: If the file cannot be read.
        ParseError: If the content is not a valid grouped table.
    """
    return parse_bins_frame(_read_text(path))
