"""JSON serialization for qri reports.

Reports are serialized deterministically: keys are sorted recursively, and
numpy scalars and arrays are converted to plain Python values. Non-finite
floats, which JSON cannot represent, become null.
"""

import json
import math
from collections.abc import Mapping
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from ._types import JSONValue

__all__ = ["serialize_json", "to_json_value"]


def to_json_value(value: object) -> "JSONValue":
    """Convert a report value to a JSON-compatible value.

    Mappings become objects with sorted string keys, sequences and numpy
    arrays become arrays, numpy scalars become Python numbers, and NaN or
    infinite floats become None.

    Raises:
        TypeError: If the value has no JSON representation.
    """
    if value is None or isinstance(value, (str, bool)):
        return value
    if isinstance(value, np.generic):
        return to_json_value(value.item())
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, Mapping):
        return {str(k): to_json_value(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_json_value(item) for item in value]
    msg = f"value of type {type(value).__name__} is not JSON serializable"
    raise TypeError(msg)


def serialize_json(value: "Mapping[str, object]", *, indent: int | None = None) -> str:
    """Serialize a report mapping using deterministic serialization.

    Args:
        value: The report to serialize.
        indent: Indentation for human-readable output; None gives the
            compact form without whitespace.

    Returns:
        The JSON text.
    """
    separators = (",", ":") if indent is None else (",", ": ")
    return json.dumps(
        to_json_value(value),
        separators=separators,
        ensure_ascii=False,
        indent=indent,
        allow_nan=False,
    )
