import io
import json
import math

import pytest

from twosite.output import header, render, render_mapping, write_csv, write_json
from twosite.records import ComparisonRecord, EvolveRecord, SweepRecord
from twosite.utils.formatting import format_float


def sweep_record(value, j1=0.1, flag=""):
    return SweepRecord(curve="c", variable="t1", model="global", value=value, j1=j1, j1_check=j1,
                       dual_path_deviation=0.0, j2=-j1, p_plus=0.2, p_minus=0.8, rho12_re=-0.1,
                       rho12_im=0.0, n_bar=0.3, delta_n=-0.2, flag=flag)


@pytest.mark.parametrize("value, expected", [
    (0.1, "0.10000000000000001"),
    (1.0, "1"),
    (-0.0, "0"),
    (math.nan, "nan"),
    (math.inf, "inf"),
    (-math.inf, "-inf"),
])
def test_format_float(value, expected):
    assert format_float(value) == expected


def test_format_float_digits():
    assert format_float(math.pi, 6) == "3.14159"


def test_header_carries_units():
    columns = header(SweepRecord)
    assert columns[:5] == ["curve", "variable", "model", "value[h]", "j1[h^2]"]
    assert columns[-1] == "flag"
    assert "t[1/h]" in header(EvolveRecord)
    assert header(ComparisonRecord)[0] == "model"


def test_csv_rows_follow_record_order():
    stream = io.StringIO()
    count = write_csv([sweep_record(0.2), sweep_record(0.1, j1=math.nan, flag="degenerate")], stream)
    lines = stream.getvalue().splitlines()
    assert count == 2
    assert len(lines) == 3
    assert lines[1].startswith("c,t1,global,0.20000000000000001,0.10000000000000001,")
    assert lines[2].endswith(",degenerate")
    assert ",nan," in lines[2]


def test_csv_is_deterministic():
    records = [sweep_record(v / 7.0) for v in range(1, 20)]
    assert render(records, "csv") == render(records, "csv")


def test_empty_csv_needs_record_type():
    with pytest.raises(ValueError):
        write_csv([], io.StringIO())
    assert render([], "csv", SweepRecord).strip() == ",".join(header(SweepRecord))


def test_json_document_nulls_non_finite_values():
    stream = io.StringIO()
    write_json([sweep_record(0.1, j1=math.nan, flag="degenerate")], stream, summary={"max": math.inf, "ok": [1.0]})
    document = json.loads(stream.getvalue())
    assert document["records"][0]["j1"] is None
    assert document["records"][0]["flag"] == "degenerate"
    assert document["summary"] == {"max": None, "ok": [1.0]}


def test_render_rejects_unknown_format():
    with pytest.raises(ValueError):
        render([sweep_record(0.1)], "xml")
    with pytest.raises(ValueError):
        render_mapping({"a": 1.0}, "xml")


def test_render_mapping():
    csv_text = render_mapping({"model": "global", "j1": 0.5, "closed_form": None}, "csv")
    assert csv_text.splitlines() == ["model,j1,closed_form", "global,0.5,"]
    data = json.loads(render_mapping({"j1": math.nan, "flag": ""}, "json"))
    assert data == {"j1": None, "flag": ""}
