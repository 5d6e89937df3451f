import csv
import dataclasses
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from centerseries import bench, cli
from centerseries.corpus import CORPUS
from centerseries.descriptor import DescriptorError, from_dict, loads, resolve
from centerseries.exact import PiMultiple


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# --- bench -----------------------------------------------------------------------------

def test_square_bench_center_wins():
    r = bench.bench_entry(CORPUS["square"], [math.pi / 3], [1e-3])[0]
    assert r.reference_kind == "closed-form" and r.reference == 1j
    assert r.terms_center < r.terms_direct
    assert r.speedup > 10


def test_minimal_n_spot_check():
    # brute force with numpy: square-wave sine series against f_s = 1 at pi/3
    th, tol = math.pi / 3, 1e-3
    r = bench.bench_entry(CORPUS["square"], [th], [tol])[0]
    n = r.terms_direct
    ks = np.arange(1, 20 * n + 1)
    terms = np.where(ks % 2 == 1, 4 / (np.pi * ks), 0.0) * np.sin(ks * th)
    err = np.abs(np.cumsum(terms) - 1.0)
    assert err[n - 2] > tol
    assert np.all(err[n - 1:] <= tol)


def test_terms_to_tolerance_errors_never_return_early():
    seq = CORPUS["sawtooth1"].source
    th = 1.0
    want = th / math.pi
    got = bench.terms_to_tolerance(seq, th, lambda s: np.abs(s.imag - want), [1e-2, 1e-4])
    assert got[0] < got[1]


def test_exceeded_cap_reported_as_none():
    seq = CORPUS["square"].source
    got = bench.terms_to_tolerance(seq, 1.0, lambda s: np.abs(s.imag - 1.0), [1e-9], cap=1000)
    assert got == [None]
    r = bench.BenchmarkResult("x", 1.0, 1e-9, None, 5, 0j, "closed-form", 1000)
    assert r.row()["terms_direct"] == "exceeded-cap" and r.speedup is None


def test_bench_deterministic():
    a = bench.to_csv(bench.run_bench(["triangular"], thetas=[1.0, 2.0]))
    b = bench.to_csv(bench.run_bench(["triangular"], thetas=[1.0, 2.0]))
    assert a == b
    rows = list(csv.DictReader(a.splitlines()))
    assert [r["series"] for r in rows] == ["triangular"] * 6
    assert json.loads(bench.to_json(bench.run_bench(["triangular"], thetas=[1.0])))[0]["series"] == "triangular"


def test_default_thetas_respect_fairness_window():
    for e in CORPUS.values():
        for t in bench.default_thetas(e):
            assert all(r.distance(t) >= bench.FAIRNESS_WINDOW for r in e.root_angles)


def test_results_artifact_present():
    p = Path(__file__).resolve().parents[1] / "results" / "benchmark.csv"
    rows = list(csv.DictReader(p.read_text().splitlines()))
    assert set(r["series"] for r in rows) == set(CORPUS)
    assert rows[0].keys() == set(bench.FIELDS)


# --- descriptors ----------------------------------------------------------------------

def test_descriptor_builtin():
    s = resolve("square")
    assert s.entry is CORPUS["square"] and s.kind == "sine"


def test_descriptor_expression():
    s = loads('{"name": "sq", "rule": "1/k", "step": 2, "offset": 1, "scale": "4/pi", "kind": "sine"}')
    assert s.sequence.step == 2
    assert s.sequence.exact_coefficient(3) == PiMultiple(Fraction(4, 3), -1)


def test_descriptor_rotation_forms():
    a = from_dict({"rule": "1", "rotation": {"over_pi": "1/3"}})
    b = from_dict({"rule": "1", "rotation": math.pi / 3})
    assert a.sequence.rotation == b.sequence.rotation


@pytest.mark.parametrize("text,field", [
    ('{"rule": "1/x"}', "rule"),
    ('{"rule": "1/k", "step": 0}', "step"),
    ('{"rule": "1/k", "offset": -1}', "offset"),
    ('{"rule": "1/k", "bogus": 1}', "bogus"),
    ('{"step": 2}', "rule"),
    ('{"rule": "1/(k-3)"}', "rule"),
    ('{"rule": "square", "step": 3}', "step"),
    ('{"rule": "1/k", "kind": "tangent"}', "kind"),
    ('{"rule": "1/k", "scale": "4/p"}', "scale"),
])
def test_descriptor_errors(text, field):
    with pytest.raises(DescriptorError) as ei:
        loads(text)
    assert ei.value.field == field
    assert field in str(ei.value)


def test_descriptor_json_error_has_line():
    with pytest.raises(DescriptorError) as ei:
        loads('{\n  "rule": "1/k",\n  oops\n}')
    assert ei.value.line == 3 and "line 3" in str(ei.value)


# --- CLI --------------------------------------------------------------------------------

def test_cli_list(capsys):
    code, out, _ = run(["list-examples"], capsys)
    assert code == 0 and "square" in out and out.splitlines()[0] == "name,kind,title"


def test_cli_classify(capsys):
    code, out, _ = run(["classify", "square"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["class_tag"] == "borderline-hard"
    assert [d["angle_over_pi"] for d in rep["dominant"]] == ["0", "1"]


def test_cli_factor_exact(capsys):
    code, out, _ = run(["factor", "sawtooth1", "--precision", "exact"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["poly"]["coeffs"] == ["1", "1"]


def test_cli_eval_matches_target(capsys):
    code, out, _ = run(["eval", "square", "--start", "0.5", "--stop", "2.5", "--count", "5", "--tolerance", "1e-4"],
                       capsys)
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 5
    for r in rows:
        assert abs(float(r["f_s"]) - 1.0) < 1e-6


def test_cli_eval_special_point_flagged(capsys):
    code, out, _ = run(["eval", "square", "--start", "0", "--stop", "0", "--count", "1"], capsys)
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and rows[0]["special_point"] in ("True", "true", "1")


def test_cli_oracle_method(capsys):
    code, out, _ = run(["eval", "delta", "--method", "closed-form-oracle", "--start", "0", "--stop", "2",
                        "--count", "3"], capsys)
    assert code == 0 and len(list(csv.DictReader(out.splitlines()))) == 3


def test_cli_bench_writes_csv(tmp_path, capsys):
    code, _, _ = run(["bench", "triangular", "--theta", "1.0", "--tol", "1e-3", "--output-dir", str(tmp_path)],
                     capsys)
    text = (tmp_path / "benchmark.csv").read_text()
    assert code == 0 and text.startswith(",".join(bench.FIELDS))
    # flags before the subcommand work the same way
    code, _, _ = run(["--output-dir", str(tmp_path / "b"), "bench", "triangular", "--theta", "1.0", "--tol", "1e-3"],
                     capsys)
    assert code == 0 and (tmp_path / "b" / "benchmark.csv").read_text() == text


def test_cli_pipeline(tmp_path, capsys):
    code, _, _ = run(["pipeline", "triangular", "--count", "7", "--output-dir", str(tmp_path)], capsys)
    assert code == 0
    for f in ("classification.json", "factorization.json", "evaluation.csv", "report.json"):
        assert (tmp_path / f).exists()
    assert json.loads((tmp_path / "report.json").read_text())["class_tag"] == "borderline-soft"


def test_cli_descriptor_file(tmp_path, capsys):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"name": "alt", "rule": "(-1)^j/k", "step": 2, "offset": 1}))
    code, out, _ = run(["classify", str(p)], capsys)
    rep = json.loads(out)
    assert code == 0 and [d["angle_over_pi"] for d in rep["dominant"]] == ["-1/2", "1/2"]


def test_cli_validation_exit_code(tmp_path, capsys):
    code, _, err = run(["classify", "no-such-series"], capsys)
    assert code == 1 and "error" in err
    p = tmp_path / "bad.json"
    p.write_text('{"rule": "1/x"}')
    code, _, err = run(["factor", str(p)], capsys)
    assert code == 1 and "rule" in err
    p.write_text(json.dumps({"rule": "1/k", "sign_pattern": "mixed"}))
    code, _, err = run(["factor", str(p)], capsys)
    assert code == 1


def test_cli_verify_pass_and_mismatch(monkeypatch, capsys):
    code, out, _ = run(["verify", "triangular"], capsys)
    assert code == 0 and json.loads(out)[0]["passed"]
    broken = dataclasses.replace(CORPUS["triangular"], expected_residual=lambda k: PiMultiple(1))
    monkeypatch.setitem(CORPUS, "triangular", broken)
    code, out, _ = run(["verify", "triangular"], capsys)
    assert code == 2 and not json.loads(out)[0]["passed"]
