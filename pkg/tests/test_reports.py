from __future__ import annotations

import json
import math

import numpy as np
import sympy

from heis_schwarzian.group import Point
from heis_schwarzian.reports import csv_text, dumps, write_csv, write_json


def test_dumps_is_stable_and_versioned():
    text = dumps({"b": 1, "a": {"z": 2, "y": 3}})

    assert text.endswith("\n")
    document = json.loads(text)
    assert document["schema"] == 1
    assert list(document) == ["a", "b", "schema"]
    assert list(document["a"]) == ["y", "z"]
    assert dumps({"b": 1, "a": {"z": 2, "y": 3}}) == text


def test_values_become_plain_json():
    document = json.loads(
        dumps(
            {
                "complex": 1.5 - 2j,
                "numpy": np.float64(0.25),
                "array": np.array([1.0, 2.0]),
                "point": Point(1.0, 2.0, 3.0),
                "rational": sympy.Rational(-1, 8),
                "infinite": math.inf,
                "text": "奇异",
            }
        )
    )

    assert document["complex"] == [1.5, -2.0]
    assert document["numpy"] == 0.25
    assert document["array"] == [1.0, 2.0]
    assert document["point"] == [1.0, 2.0, 3.0]
    assert document["rational"] == "-1/8"
    assert document["infinite"] == "inf"
    assert document["text"] == "奇异"


def test_csv_cells():
    rows = [{"s": 0.1, "ok": True, "note": None}, {"s": np.float64(2.0), "ok": False, "note": "a,b"}]

    text = csv_text(rows, ("s", "ok", "note"))

    assert text.splitlines() == ["s,ok,note", "0.1,true,", '2.0,false,"a,b"']


def test_writers_create_directories(tmp_path):
    json_path = write_json(tmp_path / "deep" / "report.json", {"passed": True})
    csv_path = write_csv(tmp_path / "deep" / "cases.csv", [{"x": 1}], ("x", "y"))

    assert json.loads(json_path.read_text(encoding="utf-8"))["passed"] is True
    assert csv_path.read_text(encoding="utf-8") == "x,y\n1,\n"
    assert sorted(p.name for p in (tmp_path / "deep").iterdir()) == ["cases.csv", "report.json"]
