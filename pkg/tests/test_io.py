import json

import numpy as np
import pytest

from npsparse import io
from npsparse.errors import ParseError
from npsparse.rng import make_generator
from npsparse.solvers import RecoveryResult, TraceRow


def write_text(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_matrix_round_trip_preserves_every_bit(tmp_path):
    rng = make_generator(901)
    a = rng.standard_normal((7, 5)) * np.exp(rng.standard_normal((7, 5)) * 4)
    p = tmp_path / "a.csv"
    with open(p, "w", newline="\n") as fh:
        for row in a:
            fh.write(",".join("%.17g" % v for v in row) + "\n")
    np.testing.assert_array_equal(io.read_matrix_csv(str(p)), a)


def test_matrix_reader_skips_blank_lines(tmp_path):
    p = write_text(tmp_path / "a.csv", "1,2\n\n3,4\n   \n")
    np.testing.assert_array_equal(io.read_matrix_csv(p), [[1.0, 2.0], [3.0, 4.0]])


def test_matrix_reader_reports_ragged_row(tmp_path):
    p = write_text(tmp_path / "a.csv", "1,2\n3,4,5\n")
    with pytest.raises(ParseError) as exc:
        io.read_matrix_csv(p)
    assert exc.value.line == 2
    assert "2" in str(exc.value)


def test_matrix_reader_reports_bad_token_with_column(tmp_path):
    p = write_text(tmp_path / "a.csv", "1,2\n3,abc\n")
    with pytest.raises(ParseError) as exc:
        io.read_matrix_csv(p)
    assert exc.value.line == 2
    assert exc.value.column == 2


def test_matrix_reader_rejects_non_finite(tmp_path):
    p = write_text(tmp_path / "a.csv", "1,nan\n")
    with pytest.raises(ParseError):
        io.read_matrix_csv(p)
    p2 = write_text(tmp_path / "b.csv", "inf,1\n")
    with pytest.raises(ParseError):
        io.read_matrix_csv(p2)


def test_matrix_reader_rejects_empty_file(tmp_path):
    p = write_text(tmp_path / "a.csv", "\n\n")
    with pytest.raises(ParseError):
        io.read_matrix_csv(p)


def test_vector_reader_requires_single_column(tmp_path):
    p = write_text(tmp_path / "y.csv", "1\n2\n-3.5\n")
    np.testing.assert_array_equal(io.read_vector_csv(p), [1.0, 2.0, -3.5])
    p2 = write_text(tmp_path / "bad.csv", "1,2\n")
    with pytest.raises(ParseError):
        io.read_vector_csv(p2)


def test_parse_error_carries_location():
    err = ParseError("bad token", file="f.csv", line=3, column=7)
    assert err.file == "f.csv" and err.line == 3 and err.column == 7
    assert "f.csv" in str(err) and "3" in str(err) and "7" in str(err)


def make_result():
    trace = (
        TraceRow(1, float("inf"), 0.5, 0.001),
        TraceRow(2, 0.25, 0.01, 0.002),
        TraceRow(3, 1e-7, 1e-6, 0.004),
    )
    return RecoveryResult(x_hat=np.array([0.0, -1.25, 3e-17]),
                          iterations=3, termination="converged", trace=trace)


def test_recovery_csv_sections_and_values(tmp_path):
    p = tmp_path / "out.csv"
    io.write_recovery_result(str(p), "csv", {"method": "np1", "timing": False},
                             make_result(), m=2, n=3)
    lines = p.read_text().splitlines()
    assert lines[0] == f"schema_version,{io.SCHEMA_VERSION}"
    assert "config,method,np1" in lines
    assert "config,timing,0" in lines
    assert "summary,iterations,3" in lines
    assert "summary,termination,converged" in lines
    xh = [ln for ln in lines if ln.startswith("x_hat,")]
    assert xh == ["x_hat,0,0", "x_hat,1,-1.25", "x_hat,2,3.0000000000000001e-17"]
    tr = [ln for ln in lines if ln.startswith("trace,")]
    assert len(tr) == 3
    # timing defaults off: the seconds column is zeroed
    assert tr[1] == "trace,2,0.25,0.01,0"
    assert tr[0].split(",")[2] == "inf"


def test_recovery_csv_timing_column_preserved_when_enabled(tmp_path):
    p = tmp_path / "out.csv"
    io.write_recovery_result(str(p), "csv", {}, make_result(), m=2, n=3,
                             include_timing=True)
    tr = [ln for ln in p.read_text().splitlines() if ln.startswith("trace,")]
    assert tr[1].endswith(",0.002")


def test_recovery_json_mirrors_csv(tmp_path):
    p = tmp_path / "out.json"
    io.write_recovery_result(str(p), "json", {"method": "np1"}, make_result(),
                             m=2, n=3)
    doc = json.loads(p.read_text())
    assert doc["schema_version"] == io.SCHEMA_VERSION
    assert doc["summary"] == {"m": 2, "n": 3, "iterations": 3,
                              "termination": "converged"}
    assert doc["x_hat"][1] == -1.25
    assert doc["trace"][0]["rel_change"] == "inf"  # non-finite as string
    assert doc["trace"][1]["seconds"] == 0.0


def test_recovery_json_null_rel_error(tmp_path):
    trace = (TraceRow(1, 0.5, None, 0.01),)
    result = RecoveryResult(np.array([1.0]), 1, "converged", trace)
    p = tmp_path / "out.json"
    io.write_recovery_result(str(p), "json", {}, result, m=1, n=1)
    doc = json.loads(p.read_text())
    assert doc["trace"][0]["rel_error"] is None
    pc = tmp_path / "out.csv"
    io.write_recovery_result(str(pc), "csv", {}, result, m=1, n=1)
    tr = [ln for ln in pc.read_text().splitlines() if ln.startswith("trace,")]
    assert tr[0] == "trace,1,0.5,,0"


def test_unknown_format_rejected(tmp_path):
    with pytest.raises(ValueError):
        io.write_recovery_result(str(tmp_path / "x"), "xml", {},
                                 make_result(), m=2, n=3)


def test_grid_csv_layout(tmp_path):
    from npsparse.harness import AxisSpec, run_phase_sweep
    grid = run_phase_sweep(AxisSpec("k", 1), (4, 6), ("np0",),
                           trials=2, master_seed=11, n=12)
    p = tmp_path / "grid.csv"
    io.write_grid(str(p), "csv", {"seed": 11, "methods": ("np0",)}, grid)
    lines = p.read_text().splitlines()
    assert lines[0] == f"schema_version,{io.SCHEMA_VERSION}"
    assert "config,methods,np0" in lines
    header = "sweep_value,method,success_rate,mean_mse_db,mean_iterations,mean_seconds"
    assert header in lines
    data = lines[lines.index(header) + 1:]
    assert len(data) == 2
    assert data[0].startswith("4,np0,")
    assert all(ln.endswith(",0") for ln in data)  # timing off

    pj = tmp_path / "grid.json"
    io.write_grid(str(pj), "json", {"seed": 11}, grid)
    doc = json.loads(pj.read_text())
    assert [pt["sweep_value"] for pt in doc["points"]] == [4, 6]


def test_trace_table_csv_layout(tmp_path):
    from npsparse.harness import run_convergence_trace
    table = run_convergence_trace(16, 8, 1, ("np0",), seed=14)
    p = tmp_path / "trace.csv"
    io.write_trace_table(str(p), "csv", {"seed": 14}, table)
    lines = p.read_text().splitlines()
    assert "method,iteration,rel_change,mse_db,seconds" in lines
    data = [ln for ln in lines if ln.startswith("np0,")]
    assert len(data) == table.results["np0"].iterations
    # trace timing defaults on: cumulative seconds are real and non-decreasing
    secs = [float(ln.split(",")[4]) for ln in data]
    assert all(b >= a for a, b in zip(secs, secs[1:]))
    assert secs[-1] > 0.0


def test_written_floats_parse_back_exactly(tmp_path):
    rng = make_generator(902)
    values = rng.standard_normal(64) * np.exp(rng.standard_normal(64) * 6)
    result = RecoveryResult(values, 1, "converged",
                            (TraceRow(1, 1e-9, None, 0.0),))
    p = tmp_path / "out.csv"
    io.write_recovery_result(str(p), "csv", {}, result, m=1, n=64)
    parsed = [float(ln.split(",")[2]) for ln in p.read_text().splitlines()
              if ln.startswith("x_hat,")]
    np.testing.assert_array_equal(np.array(parsed), values)
