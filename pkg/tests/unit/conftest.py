"""Shared fixtures for unit tests."""

from typing import TYPE_CHECKING

import numpy as np
import pytest

from qri import DistributionSpec, SeededRng, SortedSample, ingest, sample

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable
    from pathlib import Path


@pytest.fixture
def lognormal_sample() -> SortedSample:
    """A fixed-seed sample of 1000 standard lognormal incomes."""
    return ingest(sample(DistributionSpec.lognormal(0.0, 1.0), 1000, SeededRng(20)))


@pytest.fixture
def evenly_spaced() -> SortedSample:
    """The sample 1, 2, ..., 100, whose Type 8 quantiles are linear in p."""
    return ingest(np.arange(1.0, 101.0))


@pytest.fixture
def write_incomes(tmp_path: "Path") -> "Callable[..., Path]":
    """Factory fixture writing a single-column income CSV.

    Returns:
        A callable taking the incomes and an optional header line, returning
        the path of the new file.

    Example:
        def test_estimate(write_incomes) -> None:
            path = write_incomes([1, 2, 3], "income")
            assert path.read_text() == "income\\n1\\n2\\n3\\n"
    """
    counter = 0

    def create(values: "Iterable[float]", header: str | None = "income") -> "Path":
        nonlocal counter
        counter += 1
        path = tmp_path / f"incomes_{counter}.csv"
        lines = [] if header is None else [header]
        lines.extend(str(value) for value in values)
        _ = path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
        return path

    return create


@pytest.fixture
def write_text(tmp_path: "Path") -> "Callable[[str], Path]":
    """Factory fixture writing arbitrary text to a fresh CSV file."""
    counter = 0

    def create(text: str) -> "Path":
        nonlocal counter
        counter += 1
        path = tmp_path / f"input_{counter}.csv"
        _ = path.write_text(text, encoding="utf-8")
        return path

    return create
