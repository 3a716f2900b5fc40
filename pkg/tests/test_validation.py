import json
import math

import numpy as np
import pytest

from chopkit.config import TipPose
from chopkit.errors import EmptyFile, InsufficientData, MissingColumn, NonNumericField
from chopkit.validation import (
    PosePairRecord,
    error_report,
    ingest_csv,
    render_report,
    write_pose_pairs_csv,
)


def _pair(c, o, tag=None):
    return PosePairRecord(TipPose(*c), TipPose(*o), tag)


def test_identity_pairs_zero_error():
    records = [_pair((1, 2, 3), (1, 2, 3)), _pair((4, 5, 6), (4, 5, 6))]
    report = error_report(records)
    assert report.mean_l2 == 0.0
    assert report.std_l2 == 0.0
    assert report.radial_trend_slope == 0.0
    assert report.n == 2


def test_three_four_five_offset():
    records = [_pair((0, 0, 170), (3, 4, 170))] * 2
    report = error_report(records)
    assert report.mean_l2 == pytest.approx(5.0, abs=1e-12)
    assert report.std_l2 == pytest.approx(0.0, abs=1e-12)
    assert report.x_mean == pytest.approx(3.0)
    assert report.y_mean == pytest.approx(4.0)
    assert report.z_mean == 0.0


def test_insufficient_data():
    with pytest.raises(InsufficientData):
        error_report([_pair((0, 0, 0), (1, 0, 0))])


def test_permutation_invariance():
    rng = np.random.default_rng(41)
    records = [_pair(rng.uniform(-40, 40, 3), rng.uniform(-40, 40, 3))
               for _ in range(50)]
    a = error_report(records)
    b = error_report(list(reversed(records)))
    assert a == b


def test_scaling_property():
    rng = np.random.default_rng(42)
    records = [_pair(rng.uniform(-40, 40, 3), rng.uniform(-40, 40, 3))
               for _ in range(30)]
    k = 2.5
    scaled = [_pair(tuple(k * v for v in r.commanded.as_tuple()),
                    tuple(k * v for v in r.observed.as_tuple()))
              for r in records]
    a, b = error_report(records), error_report(scaled)
    assert b.mean_l2 == pytest.approx(k * a.mean_l2, rel=1e-12)
    assert b.x_mean == pytest.approx(k * a.x_mean, rel=1e-12)
    assert b.z_std == pytest.approx(k * a.z_std, rel=1e-12)


def test_per_record_l2_dominates_axis_errors():
    rng = np.random.default_rng(43)
    for _ in range(100):
        rec = _pair(rng.uniform(-40, 40, 3), rng.uniform(-40, 40, 3))
        diff = [abs(c - o) for c, o in zip(rec.commanded.as_tuple(),
                                           rec.observed.as_tuple())]
        assert rec.l2_error >= max(diff) - 1e-12


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        _pair((0, 0, float("nan")), (0, 0, 0))


# --- CSV ingestion ---------------------------------------------------------------

def test_ingest_round_trip(tmp_path):
    records = [_pair((1, 2, 3), (1.5, 2.5, 3.5), "a"),
               _pair((-4, 5, 160), (-4.25, 5.5, 161))]
    path = tmp_path / "pairs.csv"
    write_pose_pairs_csv(records, path)
    again = ingest_csv(path)
    assert again == records


def test_missing_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("cx,cy,cz,ox,oy\n1,2,3,4,5\n")
    with pytest.raises(MissingColumn, match="oz"):
        ingest_csv(path)


def test_non_numeric_reports_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("cx,cy,cz,ox,oy,oz\n1,2,3,4,5,6\n1,2,nope,4,5,6\n")
    with pytest.raises(NonNumericField) as info:
        ingest_csv(path)
    assert info.value.row == 3


def test_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(EmptyFile):
        ingest_csv(path)
    path.write_text("cx,cy,cz,ox,oy,oz\n")
    with pytest.raises(EmptyFile):
        ingest_csv(path)


def test_header_only_order_free(tmp_path):
    path = tmp_path / "shuffled.csv"
    path.write_text("oz,oy,ox,cz,cy,cx\n6,5,4,3,2,1\n6,5,4,3,2,1\n")
    records = ingest_csv(path)
    assert records[0].commanded == TipPose(1.0, 2.0, 3.0)
    assert records[0].observed == TipPose(4.0, 5.0, 6.0)


# --- rendering -------------------------------------------------------------------

def _sample_report():
    rng = np.random.default_rng(44)
    records = [_pair(rng.uniform(-40, 40, 3), rng.uniform(-40, 40, 3))
               for _ in range(20)]
    return error_report(records)


def test_json_schema_exact_keys():
    doc = json.loads(render_report(_sample_report(), "json"))
    assert set(doc) == {"mean_l2", "std_l2", "x", "y", "z", "slope", "r", "n"}
    for axis in ("x", "y", "z"):
        assert set(doc[axis]) == {"mean", "std"}


def test_csv_schema():
    text = render_report(_sample_report(), "csv")
    lines = text.strip().splitlines()
    assert lines[0] == "mean_l2,std_l2,x_mean,x_std,y_mean,y_std,z_mean,z_std,slope,r,n"
    assert len(lines) == 2
    assert len(lines[1].split(",")) == 11


def test_text_contains_reference_row():
    text = render_report(_sample_report(), "text")
    assert "reference" in text
    assert "2.93" in text and "1.3" in text
    assert "mean absolute" in text


def test_rendering_is_deterministic():
    report = _sample_report()
    for fmt in ("text", "json", "csv"):
        assert render_report(report, fmt) == render_report(report, fmt)


def test_unknown_format():
    with pytest.raises(ValueError):
        render_report(_sample_report(), "xml")
