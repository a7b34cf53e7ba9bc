import math

import numpy as np
import pytest

from qri import serialize_json, to_json_value


class TestToJsonValue:
    @pytest.mark.parametrize(
        ("value", "expected"),
        [
            (None, None),
            (True, True),
            (3, 3),
            (0.25, 0.25),
            ("grid", "grid"),
            (np.float64(0.5), 0.5),
            (np.int64(7), 7),
            (np.bool_(True), True),
            (math.nan, None),
            (math.inf, None),
            (np.float64(-np.inf), None),
        ],
        ids=[
            "null",
            "bool",
            "int",
            "float",
            "string",
            "numpy_float",
            "numpy_int",
            "numpy_bool",
            "nan",
            "inf",
            "numpy_negative_inf",
        ],
    )
    def test_scalars(self, value: object, expected: object) -> None:
        converted = to_json_value(value)
        assert converted == expected
        assert type(converted) is type(expected)

    def test_arrays_and_tuples(self) -> None:
        assert to_json_value(np.asarray([1.0, np.nan])) == [1.0, None]
        assert to_json_value((1, (2, 3))) == [1, [2, 3]]
        assert to_json_value(np.eye(2)) == [[1.0, 0.0], [0.0, 1.0]]

    def test_mapping_keys_sorted(self) -> None:
        converted = to_json_value({"b": 1, "a": {"d": 2, "c": 3}})
        assert isinstance(converted, dict)
        assert list(converted) == ["a", "b"]
        inner = converted["a"]
        assert isinstance(inner, dict)
        assert list(inner) == ["c", "d"]

    def test_unsupported_type(self) -> None:
        with pytest.raises(TypeError, match="set is not JSON serializable"):
            _ = to_json_value({1, 2})


class TestSerializeJson:
    def test_compact_and_sorted(self) -> None:
        assert serialize_json({"se": None, "value": 0.5, "k": 1}) == (
            '{"k":1,"se":null,"value":0.5}'
        )

    def test_indented(self) -> None:
        assert serialize_json({"b": [1], "a": 1}, indent=2) == (
            '{\n  "a": 1,\n  "b": [\n    1\n  ]\n}'
        )

    def test_non_ascii_kept(self) -> None:
        assert serialize_json({"family": "Fréchet"}) == '{"family":"Fréchet"}'

    def test_nan_becomes_null(self) -> None:
        assert serialize_json({"mean_width": math.nan}) == '{"mean_width":null}'
