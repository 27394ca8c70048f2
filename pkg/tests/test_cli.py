import json
import socket

import pytest

from mmsym import catalog
from mmsym.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestVerify:
    def test_builtin_z4z3(self, capsys):
        code, out, _ = run(capsys, "verify", "builtin:z4z3")
        assert code == 0
        assert "23 terms" in out and "residual 0" in out

    def test_builtin_standard3(self, capsys):
        code, out, _ = run(capsys, "verify", "builtin:standard3")
        assert code == 0 and "27 terms" in out

    def test_records_format(self, capsys):
        code, out, _ = run(capsys, "--format", "records", "verify", "builtin:twofix_z3")
        record = json.loads(out)
        assert code == 0 and record["exact"] and record["terms"] == 23

    def test_broken_file_exits_one(self, capsys, tmp_path, builtins):
        from mmsym.core import Decomposition
        dec = builtins["z4z3"]
        broken = Decomposition(3, dec.terms[1:], name="broken")
        path = tmp_path / "broken.json"
        catalog.save(broken, path)
        code, out, _ = run(capsys, "verify", str(path))
        assert code == 1 and "nonzero residual" in out

    def test_unknown_builtin_usage_error(self, capsys):
        code, _, err = run(capsys, "verify", "builtin:nope")
        assert code == 2 and "unknown builtin" in err


class TestAnalyze:
    def test_charpolys_table1(self, capsys):
        code, out, _ = run(capsys, "--format", "records",
                           "analyze", "builtin:z4z3", "--charpolys")
        record = json.loads(out)
        assert code == 0
        sym = {tuple(entry[0].split()): entry[1]
               for entry in record["fingerprint"]["symmetric"]}
        counts = sorted(c for _, c in sym.items())
        assert counts == [1, 4, 6]
        assert record["fingerprint"]["triples"] == [[["t^3", "t^3", "t^3"], 4]]

    def test_orbits_from_metadata(self, capsys):
        code, out, _ = run(capsys, "--format", "records",
                           "analyze", "builtin:lader_z3", "--orbits", "metadata")
        record = json.loads(out)
        assert code == 0
        assert sorted(len(o) for o in record["orbits"]) == [1, 4, 4, 6, 8]

    def test_orbits_from_file(self, capsys, tmp_path):
        gens = {"generators": [
            catalog.element_to_json(catalog.a0_conjugation()),
            catalog.element_to_json(catalog.builtin_element("cyclic")),
        ]}
        path = tmp_path / "gens.json"
        path.write_text(json.dumps(gens))
        code, out, _ = run(capsys, "--format", "records",
                           "analyze", "builtin:z4z3", "--orbits", str(path))
        record = json.loads(out)
        assert sorted(len(o) for o in record["orbits"]) == [1, 2, 4, 4, 12]

    def test_graphs_written(self, capsys, tmp_path):
        outdir = tmp_path / "graphs"
        code, out, _ = run(capsys, "analyze", "builtin:standard3",
                           "--graphs", str(outdir))
        assert code == 0
        inc = (outdir / "standard3_incidence.dot").read_text()
        pair = (outdir / "standard3_pairing.dot").read_text()
        assert "t0" in inc and "b0" in inc
        assert pair.count("style=dashed") == 3

    def test_config(self, capsys):
        code, out, _ = run(capsys, "--format", "records",
                           "analyze", "builtin:twofix_z3", "--config")
        record = json.loads(out)
        assert len(record["configuration"]["column_points"]) == 6
        assert len(record["configuration"]["row_points"]) == 6


class TestDims:
    @pytest.mark.parametrize("n,expected", [(2, 22), (3, 183), (4, 820)])
    def test_zn1(self, capsys, n, expected):
        code, out, _ = run(capsys, "--format", "records",
                           "dims", "--n", str(n), "--group", "zn1")
        assert code == 0 and json.loads(out)["dim"] == expected

    def test_zn1xz3(self, capsys):
        code, out, _ = run(capsys, "dims", "--n", "2", "--group", "zn1xz3")
        assert code == 0 and "8+2=10" in out

    def test_z3(self, capsys):
        code, out, _ = run(capsys, "--format", "records",
                           "dims", "--n", "3", "--group", "z3")
        assert json.loads(out)["dim"] == 249

    def test_zn1_check_projector(self, capsys):
        code, out, _ = run(capsys, "dims", "--n", "2", "--group", "zn1",
                           "--check-projector")
        assert code == 0
        assert "closed-form 22 = projector rank 22" in out


class TestSearch:
    def test_pq_usage_error(self, capsys):
        code, _, err = run(capsys, "search", "--n", "2", "--rank", "7",
                           "--p", "2", "--q", "2", "--restarts", "1")
        assert code == 2 and "P + 3Q" in err

    def test_zero_restarts(self, capsys, tmp_path):
        report = tmp_path / "report.jsonl"
        code, out, _ = run(capsys, "search", "--n", "2", "--rank", "7",
                           "--p", "1", "--q", "2", "--restarts", "0",
                           "--report", str(report))
        assert code == 0
        assert report.read_text() == ""

    def test_m2_finds_exact(self, capsys, tmp_path):
        sched = tmp_path / "sched.json"
        sched.write_text(json.dumps({
            "format": 1, "kind": "schedule",
            "phases": [
                {"iterations": 60, "lambda": 0.1, "zeros": 0, "project_every": 10},
                {"iterations": 150, "lambda": 0.1, "zeros": 4, "project_every": 10},
                {"iterations": 150, "lambda": 0.1, "zeros": 8, "project_every": 10},
                {"iterations": 150, "lambda": 0.1, "zeros": 10, "project_every": 10},
                {"iterations": 150, "lambda": 0.1, "zeros": 12, "project_every": 10},
                {"iterations": 100, "lambda": 0.01, "zeros": 12, "project_every": 10},
                {"iterations": 50, "lambda": 0.001, "zeros": 12, "project_every": 10},
            ],
        }))
        out_path = tmp_path / "m2.json"
        events_path = tmp_path / "events.jsonl"
        code, out, _ = run(capsys, "--format", "records", "search",
                           "--n", "2", "--rank", "7", "--p", "1", "--q", "2",
                           "--restarts", "3", "--seed", "0",
                           "--schedule", str(sched),
                           "--value-set", "0,1,-1,1/2,-1/2",
                           "--out", str(out_path), "--events", str(events_path))
        record = json.loads(out)
        assert code == 0 and record["found"]
        dec = catalog.load(out_path)
        assert dec.rank == 7
        from mmsym.core import residual
        assert residual(dec)[1] == 0
        lines = [json.loads(line) for line in events_path.read_text().splitlines()]
        iters = [rec["iter"] for rec in lines if "objective" in rec]
        assert iters == list(range(1, len(iters) + 1))

    def test_parallel_jobs_match_sequential_best(self, capsys, tmp_path):
        args = ["--format", "records", "search", "--n", "2", "--rank", "7",
                "--p", "1", "--q", "2", "--restarts", "4", "--seed", "10",
                "--budget", "300"]
        code, out, _ = run(capsys, *args)
        seq = json.loads(out)
        code, out, _ = run(capsys, *args, "--jobs", "4")
        par = json.loads(out)
        assert code == 0
        assert par["best"] == seq["best"]


class TestTransformEqual:
    def test_transform_then_equal(self, capsys, tmp_path):
        moved = tmp_path / "moved.json"
        code, _, _ = run(capsys, "transform", "builtin:z4z3",
                         "--element", "a0conj", "--out", str(moved))
        assert code == 0
        code, out, _ = run(capsys, "equal", str(moved), "builtin:z4z3")
        assert code == 0 and "equal" in out

    def test_not_equal(self, capsys):
        code, out, _ = run(capsys, "equal", "builtin:z4z3", "builtin:lader_z3")
        assert code == 1 and "not equal" in out

    def test_singular_element_rejected(self, capsys, tmp_path):
        bad = {
            "g": [[1, 0, 0], [0, 1, 0], [0, 0, 0]],
            "h": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            "k": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            "cyclic": 0, "transpose": False,
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        code, _, err = run(capsys, "transform", "builtin:z4z3",
                           "--element", str(path), "--out", str(tmp_path / "o.json"))
        assert code == 2 and "singular" in err

    def test_element_file_roundtrip(self, capsys, tmp_path):
        doc = catalog.element_to_json(catalog.lader_zeta())
        path = tmp_path / "zeta.json"
        path.write_text(json.dumps(doc))
        moved = tmp_path / "moved.json"
        code, _, _ = run(capsys, "transform", "builtin:lader_z3",
                         "--element", str(path), "--out", str(moved))
        assert code == 0
        code, _, _ = run(capsys, "equal", str(moved), "builtin:lader_z3")
        assert code == 0


class TestServe:
    def test_occupied_port_reports_error(self, capsys):
        sock = socket.socket()
        sock.bind(("127.0.0.1", 0))
        port = sock.getsockname()[1]
        sock.listen(1)
        try:
            code, _, err = run(capsys, "serve", "--port", str(port))
            assert code == 3
            assert "failed to start" in err or "error" in err.lower()
        finally:
            sock.close()

    def test_usage_error_exit_code(self, capsys):
        assert main(["dims"]) == 2  # missing required --n
