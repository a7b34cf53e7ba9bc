"""File writing operations for qri.

Output files are replaced atomically so an interrupted run never leaves a
truncated CSV or JSON report behind.
"""

import contextlib
import io
import os
import sys
import tempfile
from pathlib import Path
from typing import TYPE_CHECKING

from ._exceptions import FileError
from ._json import serialize_json

if TYPE_CHECKING:
    from collections.abc import Mapping

    import pandas as pd

__all__ = ["atomic_replace", "frame_to_csv", "write_csv", "write_json"]


def _sync_directory(directory: Path) -> None:
    # Windows cannot open directories for fsync
    if sys.platform == "win32":
        return
    fd = os.open(directory, os.O_RDONLY)
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


def atomic_replace(path: Path, text: str) -> None:
    """Replace the contents of ``path`` with ``text`` in one rename.

    The text goes to a ``.qri_*.tmp`` sibling that is flushed to disk and
    then renamed over the target, so readers see either the old report or
    the new one.

    Raises:
        FileError: If the temporary file cannot be written or renamed.
    """
    staged: Path | None = None
    try:
        with tempfile.NamedTemporaryFile(
            "w",
            encoding="utf-8",
            newline="",
            dir=path.parent,
            prefix=".qri_",
            suffix=".tmp",
            delete=False,
        ) as handle:
            staged = Path(handle.name)
            _ = handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        _ = staged.replace(path)
        staged = None
        _sync_directory(path.parent)
    except OSError as e:
        msg = f"cannot write {path}: {e}"
        raise FileError(msg) from e
    finally:
        if staged is not None:
            with contextlib.suppress(OSError):
                staged.unlink()


def frame_to_csv(frame: "pd.DataFrame") -> str:
    """Render a frame as CSV text with ``\\n`` line endings and no index."""
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def write_csv(path: Path | str, frame: "pd.DataFrame") -> None:
    """Atomically write a frame as CSV.

    Raises:
        FileError: If the file cannot be written.
    """
    atomic_replace(Path(path), frame_to_csv(frame))


def write_json(path: Path | str, report: "Mapping[str, object]") -> None:
    """Atomically write a report as indented, key-sorted JSON.

    Raises:
        FileError: If the file cannot be written.
    """
    atomic_replace(Path(path), serialize_json(report, indent=2) + "\n")
