import json
from typing import TYPE_CHECKING

import pandas as pd
import pytest

from qri import FileError, atomic_replace, frame_to_csv, write_csv, write_json

if TYPE_CHECKING:
    from pathlib import Path


class TestAtomicReplace:
    def test_creates_file(self, tmp_path: "Path") -> None:
        path = tmp_path / "report.json"
        atomic_replace(path, "{}\n")
        assert path.read_text() == "{}\n"

    def test_replaces_existing_content(self, tmp_path: "Path") -> None:
        path = tmp_path / "report.csv"
        _ = path.write_text("old contents that are longer\n")
        atomic_replace(path, "new\n")
        assert path.read_text() == "new\n"

    def test_no_temp_files_left(self, tmp_path: "Path") -> None:
        path = tmp_path / "report.csv"
        atomic_replace(path, "a\n")
        atomic_replace(path, "b\n")
        assert [p.name for p in tmp_path.iterdir()] == ["report.csv"]

    def test_keeps_line_endings(self, tmp_path: "Path") -> None:
        path = tmp_path / "report.csv"
        atomic_replace(path, "a\nb\n")
        assert path.read_bytes() == b"a\nb\n"

    def test_unicode(self, tmp_path: "Path") -> None:
        path = tmp_path / "report.txt"
        atomic_replace(path, "LN-Fréchet\n")
        assert path.read_text(encoding="utf-8") == "LN-Fréchet\n"

    def test_missing_directory(self, tmp_path: "Path") -> None:
        with pytest.raises(FileError, match="cannot write"):
            atomic_replace(tmp_path / "missing" / "report.csv", "x\n")


class TestFrameToCsv:
    def test_no_index_and_unix_newlines(self) -> None:
        frame = pd.DataFrame({"x": [0.0, 0.5], "density": [0.1, 0.2]})
        assert frame_to_csv(frame) == "x,density\n0.0,0.1\n0.5,0.2\n"

    def test_missing_values_blank(self) -> None:
        frame = pd.DataFrame({"k": ["total"], "se": [None]})
        assert frame_to_csv(frame) == "k,se\ntotal,\n"


class TestWriteReports:
    def test_write_csv(self, tmp_path: "Path") -> None:
        path = tmp_path / "income.csv"
        write_csv(path, pd.DataFrame({"income": [1.5, 2.0]}))
        assert path.read_text() == "income\n1.5\n2.0\n"

    def test_write_csv_string_path(self, tmp_path: "Path") -> None:
        path = tmp_path / "income.csv"
        write_csv(str(path), pd.DataFrame({"income": [1.0]}))
        assert path.exists()

    def test_write_json(self, tmp_path: "Path") -> None:
        path = tmp_path / "report.json"
        write_json(path, {"value": 0.5, "ci": [0.4, 0.6]})
        text = path.read_text()
        assert text.endswith("}\n")
        assert text.startswith('{\n  "ci"')
        assert json.loads(text) == {"ci": [0.4, 0.6], "value": 0.5}

    def test_write_json_failure(self, tmp_path: "Path") -> None:
        with pytest.raises(FileError):
            write_json(tmp_path / "missing" / "report.json", {})
