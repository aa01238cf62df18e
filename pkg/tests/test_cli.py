import json

import numpy as np
import pytest

from szegodet.cli import main
from szegodet.predict import LOG_2PI


@pytest.fixture
def curve_file(tmp_path):
    def write(name, cap=1.0, phi0=(0.0, 0.0), tail=((0.5, 0.0), (0.0, 0.0))):
        p = tmp_path / name
        p.write_text(json.dumps({"cap": cap, "phi0": list(phi0),
                                 "tail": [list(t) for t in tail]}))
        return str(p)

    return write


@pytest.fixture
def symbol_file(tmp_path):
    p = tmp_path / "a1.json"
    p.write_text(json.dumps({"a0": [0.0, 0.0], "a": [[1.0, 0.0]], "b": []}))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestPredict:
    def test_circle(self, capsys, curve_file):
        path = curve_file("circle.json", tail=((0.0, 0.0),))
        code, out, _ = run(capsys, "predict", "--curve", path, "--n", "5")
        assert code == 0
        doc = json.loads(out)
        assert doc["total_log"][0] == pytest.approx(5 * LOG_2PI)
        assert doc["total_log"][1] == 0.0

    def test_round_trip_fields(self, capsys, curve_file, symbol_file):
        path = curve_file("q.json")
        code, out, _ = run(capsys, "predict", "--curve", path,
                           "--symbol", symbol_file, "--n", "12")
        doc = json.loads(out)
        total = (doc["term_cap"] + doc["term_2pi"]
                 + doc["term_a0"][0] + doc["term_quadform"][0]
                 + doc["term_halflogdet"])
        assert total == pytest.approx(doc["total_log"][0], abs=1e-12)

    def test_round_trip_into_type(self, capsys, curve_file, symbol_file):
        # the emitted JSON re-parses into the producing value unchanged
        from szegodet import predict_log_Dn
        from szegodet.cli import load_curve, load_symbol
        from szegodet.predict import PredictionBreakdown

        path = curve_file("q.json")
        code, out, _ = run(capsys, "predict", "--curve", path,
                           "--symbol", symbol_file, "--n", "12")
        parsed = PredictionBreakdown.from_json_dict(json.loads(out))
        direct = predict_log_Dn(load_curve(path), load_symbol(symbol_file), 12)
        assert parsed == direct

    def test_theta_samples_symbol(self, capsys, curve_file, tmp_path):
        theta = 2 * np.pi * np.arange(16) / 16
        p = tmp_path / "samples.json"
        p.write_text(json.dumps(
            {"theta_samples": [[float(np.cos(t)), 0.0] for t in theta]}
        ))
        path = curve_file("circle.json", tail=((0.0, 0.0),))
        code, out, _ = run(capsys, "predict", "--curve", path,
                           "--symbol", str(p), "--n", "10")
        assert code == 0
        doc = json.loads(out)
        assert doc["total_log"][0] == pytest.approx(10 * LOG_2PI + 0.25, abs=1e-10)

    def test_exclusive_symbol_keys(self, capsys, curve_file, tmp_path):
        p = tmp_path / "both.json"
        p.write_text(json.dumps({"a0": [0, 0], "theta_samples": [[0, 0]] * 8}))
        path = curve_file("q.json")
        code, _, err = run(capsys, "predict", "--curve", path,
                           "--symbol", str(p), "--n", "4")
        assert code == 2


class TestGrunsky:
    def test_q_table(self, capsys, curve_file, tmp_path):
        path = curve_file("q.json")
        report = tmp_path / "rep.json"
        code, out, _ = run(capsys, "grunsky", "--curve", path, "--m", "8",
                           "--report-out", str(report))
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "k,l,re_a,im_a"
        rows = {tuple(map(int, l.split(",")[:2])): float(l.split(",")[2]) for l in lines[1:]}
        for k in range(1, 9):
            assert rows[(k, k)] == pytest.approx(0.5**k / k, abs=1e-14)
            if k > 1:
                assert rows[(k, k - 1)] == 0.0
        doc = json.loads(report.read_text())
        assert doc["kappa_hat"] == pytest.approx(0.5, abs=1e-12)

    def test_report_round_trips_into_type(self, capsys, curve_file, tmp_path):
        from szegodet import grunsky_coefficients, operators, spectral_report
        from szegodet.cli import load_curve
        from szegodet.grunsky import SpectralReport

        path = curve_file("q.json")
        report = tmp_path / "rep.json"
        run(capsys, "grunsky", "--curve", path, "--m", "8",
            "--report-out", str(report))
        doc = json.loads(report.read_text())
        fields = {k: doc[k] for k in SpectralReport.__dataclass_fields__}
        parsed = SpectralReport(**fields)
        direct = spectral_report(operators(grunsky_coefficients(load_curve(path), 8)))
        assert parsed == direct


class TestDirectAndConvergence:
    def test_direct_row(self, capsys, curve_file, symbol_file):
        path = curve_file("q.json")
        code, out, _ = run(capsys, "direct", "--curve", path,
                           "--symbol", symbol_file, "--n", "8")
        assert code == 0
        header, row = out.strip().split("\n")
        assert header == "n,N_nodes,log_Dn_re,log_Dn_im,predicted,residual,converged"
        f = row.split(",")
        assert int(f[0]) == 8 and int(f[6]) == 1
        assert float(f[5]) <= 1e-3

    def test_convergence_sweep(self, capsys, curve_file, symbol_file, tmp_path):
        path = curve_file("q.json")
        svg = tmp_path / "plot.svg"
        code, out, _ = run(capsys, "convergence", "--curve", path,
                           "--symbol", symbol_file, "--n", "4..10",
                           "--svg", str(svg))
        assert code == 0
        rows = out.strip().split("\n")[1:]
        assert len(rows) == 7
        residuals = [float(r.split(",")[5]) for r in rows]
        assert residuals[-1] < residuals[0]
        assert svg.read_text().startswith("<svg")

    def test_threads_env(self, capsys, curve_file, monkeypatch):
        path = curve_file("q.json")
        monkeypatch.setenv("SZEGO_THREADS", "2")
        code, out, _ = run(capsys, "convergence", "--curve", path, "--n", "3..6")
        assert code == 0
        assert len(out.strip().split("\n")) == 5


class TestEnergyAndWp:
    def test_energy(self, capsys, curve_file, tmp_path):
        path = curve_file("q.json")
        rep = tmp_path / "rep.json"
        code, out, _ = run(capsys, "energy", "--curve", path, "--n", "3",
                           "--r", "1.1:8:6", "--report-out", str(rep))
        assert code == 0
        rows = out.strip().split("\n")[1:]
        vals = [float(r.split(",")[1]) for r in rows]
        assert all(b <= a for a, b in zip(vals, vals[1:]))
        doc = json.loads(rep.read_text())
        assert doc["trend_decreasing_in_r"] is True
        assert doc["convexity_flagged"] is False

    def test_wp_check(self, capsys, curve_file, tmp_path):
        path = curve_file("q.json")
        rep = tmp_path / "rep.json"
        code, out, _ = run(capsys, "wp-check", "--curve", path, "--m", "8",
                           "--report-out", str(rep))
        assert code == 0
        rows = out.strip().split("\n")[1:]
        hs = [float(r.split(",")[1]) for r in rows]
        assert all(b >= a for a, b in zip(hs, hs[1:]))  # grows as r drops to 1
        doc = json.loads(rep.read_text())
        assert doc["bounded_verdict"] is True


class TestBetaMc:
    def test_row(self, capsys, curve_file):
        path = curve_file("q.json")
        code, out, _ = run(capsys, "beta-mc", "--curve", path, "--n", "3",
                           "--steps", "4000", "--burn-in", "400",
                           "--seed", "7", "--m", "8")
        assert code == 0
        header, row = out.strip().split("\n")
        assert header == "seed,mean_log,std_error,ess,acceptance"
        f = row.split(",")
        assert f[0] == "7"
        assert np.isfinite(float(f[1]))


class TestExitCodes:
    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "predict", "--curve", "nope.json", "--n", "3")
        assert code == 2
        assert "nope.json" in err

    def test_bad_json(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        code, _, _ = run(capsys, "predict", "--curve", str(p), "--n", "3")
        assert code == 2

    def test_cusp_curve(self, capsys, curve_file):
        path = curve_file("cusp.json", tail=((1.0, 0.0),))
        code, _, err = run(capsys, "predict", "--curve", path, "--n", "3")
        assert code == 3
        assert "failure" in err

    def test_bad_flags(self, capsys, curve_file):
        code, _, _ = run(capsys, "predict", "--n", "3")
        assert code == 2

    def test_bad_range(self, capsys, curve_file):
        path = curve_file("q.json")
        code, _, _ = run(capsys, "convergence", "--curve", path, "--n", "9..3")
        assert code == 2
