"""Type aliases shared across the package.

This module contains ONLY TypeAlias definitions. It has no dependencies on
other qri modules so that every module, including _exceptions.py, can import
from it without creating cycles.
"""

from typing import TYPE_CHECKING, Literal, TypeAlias

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt

FloatArray: TypeAlias = "npt.NDArray[np.float64]"
"""A one-dimensional array of double precision values."""

ArrayLikeFloat: TypeAlias = "npt.ArrayLike"
"""Anything numpy can turn into an array of floats."""

EstimationMethod: TypeAlias = Literal["grid", "exact"]
"""How an estimate was produced: Riemann grid or exact order statistics."""

EdgeMode: TypeAlias = Literal["clip", "shift"]
"""How the quantile-density window is handled near the sample edges.

- ``clip``: shrink the half-width symmetrically so both ends stay inside.
- ``shift``: keep the nominal half-width and truncate at the edges,
  giving a one-sided difference there.
"""

WindowScaling: TypeAlias = Literal["local", "fixed"]
"""How the quantile-density half-width varies with the probability.

- ``local``: scale the half-width by the distance to the nearer end of
  [0, 1], so the window narrows in the tails.
- ``fixed``: use the same half-width at every probability.
"""

OutputFormat: TypeAlias = Literal["table", "json", "csv"]
"""Output format of the command line tool."""

JSONPrimitive: TypeAlias = "str | int | float | bool | None"
"""A JSON primitive value: string, number, boolean, or null."""

JSONArray: TypeAlias = "list[JSONValue]"
"""A JSON array containing any JSON values."""

JSONObject: TypeAlias = "dict[str, JSONValue]"
"""A JSON object mapping string keys to JSON values."""

JSONValue: TypeAlias = "JSONPrimitive | JSONArray | JSONObject"
"""Any JSON value."""
