"""End-to-end runs of the command line interface.

Happy paths call cli.main in-process; exit-code behavior goes through
the installed console script so the entry point wiring is covered too.
"""

import csv
import json
import math
import subprocess

import pytest

from sphereshape import Trellis, maxwell_boltzmann
from sphereshape.cli import main


@pytest.fixture()
def dist_file(tmp_path):
    path = tmp_path / "mb.json"
    path.write_text(maxwell_boltzmann((1, 3, 5, 7), 0.1).to_json())
    return path


def run_ok(argv):
    assert main([str(a) for a in argv]) == 0


def test_quantize_weights(tmp_path, dist_file):
    out = tmp_path / "alb.json"
    run_ok(["quantize-weights", "--dist", dist_file, "-f", "3.0", "-o", out])
    obj = json.loads(out.read_text())
    assert obj == {"amplitudes": [1, 3, 5, 7], "weights": [0, 3, 10, 21]}


def test_quantize_weights_natural_log(tmp_path, capsys):
    d = tmp_path / "d.json"
    d.write_text(json.dumps({"amplitudes": [1, 3, 5, 7], "probs": [0.4, 0.3, 0.2, 0.1]}))
    run_ok(["quantize-weights", "--dist", d, "-f", "10", "--log-base", "e", "--absolute"])
    obj = json.loads(capsys.readouterr().out)
    assert obj["weights"] == [0, 3, 7, 14]


def test_build_shape_deshape_round_trip(tmp_path, dist_file, capsys):
    alb = tmp_path / "alb.json"
    run_ok(["quantize-weights", "--dist", dist_file, "-f", "1.3", "-o", alb])
    cache = tmp_path / "t.sst"
    run_ok(["build-trellis", "--alphabet", alb, "--n", "32", "--k-bits", "48",
            "--out", cache])
    info = json.loads(capsys.readouterr().out)
    assert info["n"] == 32
    assert info["max_payload_bits"] >= 48
    assert int(info["num_sequences"]) == Trellis.load(cache).num_sequences

    payload = "deadbeefc0ff"  # 12 hex digits, exactly the 48-bit budget
    seq = tmp_path / "seq.txt"
    run_ok(["shape", "--trellis", cache, "--k-bits", "48", "--payload-hex", payload,
            "--out", seq])
    amps = seq.read_text().strip()
    assert len(amps.split(",")) == 32

    run_ok(["deshape", "--trellis", cache, "--k-bits", "48", "--seq", amps])
    assert capsys.readouterr().out.strip() == payload


def test_shape_payload_file_binary(tmp_path, dist_file, capsys):
    alb = tmp_path / "alb.json"
    run_ok(["quantize-weights", "--dist", dist_file, "-f", "0.2", "-o", alb])
    cache = tmp_path / "t.sst"
    run_ok(["build-trellis", "--alphabet", alb, "--n", "24", "--l-max", "3",
            "--out", cache])
    capsys.readouterr()
    raw = tmp_path / "payload.bin"
    raw.write_bytes((0x0ABC).to_bytes(2, "big"))
    run_ok(["shape", "--trellis", cache, "--k-bits", "13", "--payload-file", raw])
    amps = capsys.readouterr().out.strip()
    run_ok(["deshape", "--trellis", cache, "--k-bits", "13", "--seq", amps])
    assert capsys.readouterr().out.strip() == "0abc"


def test_shape_raw_index_mode(tmp_path, capsys):
    alb = tmp_path / "alb.json"
    alb.write_text(json.dumps({"amplitudes": [1, 3, 5, 7], "weights": [0, 1, 3, 6]}))
    cache = tmp_path / "t.sst"
    run_ok(["build-trellis", "--alphabet", alb, "--n", "2", "--l-max", "3",
            "--out", cache])
    capsys.readouterr()

    # 6 sequences but only a 2-bit payload; --raw reaches all of them
    for index, want in [("0", "1,1"), ("2", "1,5"), ("5", "5,1")]:
        run_ok(["shape", "--trellis", cache, "--raw", "--payload-hex", index])
        assert capsys.readouterr().out.strip() == want

    run_ok(["deshape", "--trellis", cache, "--raw", "--seq", "5,1"])
    assert capsys.readouterr().out.strip() == "5"

    assert main(["shape", "--trellis", str(cache), "--raw",
                 "--payload-hex", "6"]) == 3
    assert main(["deshape", "--trellis", str(cache), "--k-bits", "2",
                 "--seq", "5,1"]) == 3


def test_shape_zero_bit_payload(tmp_path, capsys):
    alb = tmp_path / "alb.json"
    alb.write_text(json.dumps({"amplitudes": [1, 3, 5, 7], "weights": [0, 1, 3, 6]}))
    cache = tmp_path / "t.sst"
    run_ok(["build-trellis", "--alphabet", alb, "--n", "2", "--l-max", "3",
            "--out", cache])
    capsys.readouterr()
    run_ok(["shape", "--trellis", cache, "--k-bits", "0", "--payload-hex", "0"])
    assert capsys.readouterr().out.strip() == "1,1"
    run_ok(["deshape", "--trellis", cache, "--k-bits", "0", "--seq", "1,1"])
    assert capsys.readouterr().out.strip() == "0"


def test_ccdm_round_trip(tmp_path, dist_file, capsys):
    run_ok(["ccdm", "info", "--dist", dist_file, "--n", "16"])
    info = json.loads(capsys.readouterr().out)
    assert info["composition"] == [10, 5, 1, 0]
    assert info["max_payload_bits"] == 15

    run_ok(["ccdm", "encode", "--dist", dist_file, "--n", "16",
            "--payload-hex", "7b0d"])
    seq = capsys.readouterr().out.strip()
    run_ok(["ccdm", "decode", "--dist", dist_file, "--n", "16", "--seq", seq])
    assert capsys.readouterr().out.strip() == "7b0d"


def test_analyze_report(tmp_path, dist_file, capsys):
    alb = tmp_path / "alb.json"
    run_ok(["quantize-weights", "--dist", dist_file, "-f", "3.0", "-o", alb])
    cache = tmp_path / "t.sst"
    run_ok(["build-trellis", "--alphabet", alb, "--n", "16", "--k-bits", "20",
            "--out", cache])
    capsys.readouterr()
    out = tmp_path / "report.json"
    run_ok(["analyze", "--trellis", cache, "--dist", dist_file, "--out", out])
    rep = json.loads(out.read_text())
    assert rep["n"] == 16
    assert rep["k_bits"] >= 20
    assert rep["divergence_bits"] >= 0
    assert math.isclose(sum(rep["amplitude_freqs"].values()), 1.0, rel_tol=1e-12)


def test_sweep_csv(tmp_path, dist_file):
    out = tmp_path / "sweep.csv"
    run_ok(["sweep-f", "--dist", dist_file, "--n", "32", "--k-bits", "48",
            "--f-start", "2.9", "--f-stop", "3.1", "--f-step", "0.1", "--out", out])
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert [r["f"] for r in rows] == ["2.9", "3.0", "3.1"]
    for r in rows:
        assert int(r["t00_bits"]) >= 49
        assert float(r["avg_energy"]) > 1.0


def test_sweep_parallel_matches_serial(tmp_path, dist_file):
    serial = tmp_path / "serial.csv"
    parallel = tmp_path / "parallel.csv"
    args = ["sweep-f", "--dist", dist_file, "--n", "16", "--k-bits", "20",
            "--f-start", "0.5", "--f-stop", "1.5", "--f-step", "0.25"]
    run_ok(args + ["--out", serial])
    run_ok(args + ["--jobs", "2", "--out", parallel])
    assert serial.read_text() == parallel.read_text()


def test_optimize_distribution(tmp_path, capsys):
    out = tmp_path / "ppc.json"
    run_ok(["optimize-distribution", "--psnr-db", "18", "--out", out])
    err = capsys.readouterr().err
    assert "capacity" in err
    obj = json.loads(out.read_text())
    assert obj["amplitudes"] == [1, 3, 5, 7]
    assert math.isclose(sum(obj["probs"]), 1.0, rel_tol=1e-9)


def test_optimize_sweep_csv(tmp_path):
    out = tmp_path / "cap.csv"
    run_ok(["optimize-distribution", "--psnr-sweep", "18,20,22", "--out", out])
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    caps = [float(r["capacity_bits"]) for r in rows]
    assert caps == sorted(caps)
    assert all(float(r["kkt_residual"]) < 1e-6 for r in rows)


def script(*argv, cwd=None):
    return subprocess.run(
        ["sphereshape", *map(str, argv)], capture_output=True, text=True, cwd=cwd
    )


class TestExitCodes:
    def test_usage_error_is_2(self):
        assert script("shape", "--no-such-flag").returncode == 2
        assert script().returncode == 2

    def test_invalid_input_is_3(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        r = script("quantize-weights", "--dist", bad, "-f", "1")
        assert r.returncode == 3
        assert "error:" in r.stderr

    def test_missing_file_is_3(self, tmp_path):
        r = script("quantize-weights", "--dist", tmp_path / "nope.json", "-f", "1")
        assert r.returncode == 3

    def test_infeasible_rate_is_4(self, tmp_path, dist_file):
        alb = tmp_path / "alb.json"
        assert main(["quantize-weights", "--dist", str(dist_file), "-f", "1",
                     "-o", str(alb)]) == 0
        r = script("build-trellis", "--alphabet", alb, "--n", "4", "--k-bits", "99",
                   "--out", tmp_path / "t.sst")
        assert r.returncode == 4

    def test_non_convergence_is_5(self, tmp_path):
        r = script("optimize-distribution", "--psnr-db", "18", "--max-iter", "1",
                   "--tol", "1e-15", "--out", tmp_path / "d.json")
        assert r.returncode == 5
        assert "convergence" in r.stderr
