"""Pytest configuration and shared fixtures for the qri test suite."""

from pathlib import Path
from typing import TYPE_CHECKING

import pytest
from loguru import logger

if TYPE_CHECKING:
    from collections.abc import Iterator

_TESTS_DIR = Path(__file__).parent

# First path component under tests/ -> marker name
_SUITE_MARKERS: dict[str, "pytest.MarkDecorator"] = {
    "unit": pytest.mark.unit,
    "integration": pytest.mark.integration,
    "properties": pytest.mark.property,
    "benchmarks": pytest.mark.benchmark,
}


def pytest_collection_modifyitems(items: list[pytest.Item]) -> None:
    """Mark every collected test with the suite its directory belongs to."""
    for item in items:
        if not item.path.is_relative_to(_TESTS_DIR):
            continue
        suite = item.path.relative_to(_TESTS_DIR).parts[0]
        if (marker := _SUITE_MARKERS.get(suite)) is not None:
            item.add_marker(marker)


@pytest.fixture
def log_messages() -> "Iterator[list[str]]":
    """Collect qri log messages emitted while the test runs.

    The library disables its logger on import; this fixture enables it at
    DEBUG level with a list sink and restores the disabled state afterwards.
    """
    messages: list[str] = []
    logger.enable("qri")
    sink = logger.add(messages.append, level="DEBUG", format="{level}: {message}")
    try:
        yield messages
    finally:
        logger.remove(sink)
        logger.disable("qri")
