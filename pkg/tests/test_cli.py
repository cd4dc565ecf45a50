import json

import numpy as np
import pytest

from helpers import random_diagram
from w1flow.cli import main
from w1flow.diagram import serialize_diagram


@pytest.fixture
def pair_files(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("0 2\n")
    b.write_text("0 3\n")
    return str(a), str(b)


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDist:
    def test_error_flag_matches_equivalent_s(self, capsys, pair_files):
        a, b = pair_files
        code1, out1, _ = run_cli(capsys, ["dist", a, b, "--error", "0.5"])
        code2, out2, _ = run_cli(capsys, ["dist", a, b, "--s", "39"])
        assert code1 == 0 and code2 == 0
        assert out1 == out2

    def test_identical_inputs_print_zero(self, capsys, pair_files):
        a, _ = pair_files
        code, out, _ = run_cli(capsys, ["dist", a, a, "--s", "20"])
        assert code == 0
        assert out.strip() == "0"

    def test_byte_identical_across_threads(self, capsys, tmp_path):
        rng = np.random.default_rng(191)
        fa = tmp_path / "ra.txt"
        fb = tmp_path / "rb.txt"
        fa.write_text(serialize_diagram(random_diagram(rng, 40, min_points=10)))
        fb.write_text(serialize_diagram(random_diagram(rng, 40, min_points=10)))
        _, out1, _ = run_cli(capsys, ["dist", str(fa), str(fb), "--s", "12", "--threads", "1"])
        _, out2, _ = run_cli(capsys, ["dist", str(fa), str(fb), "--s", "12", "--threads", "4"])
        assert out1 == out2

    def test_json_diagnostics(self, capsys, pair_files):
        a, b = pair_files
        code, out, _ = run_cli(capsys, ["dist", a, b, "--s", "20", "--json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["schema"] == 1
        for key in ("distance", "n", "m", "delta", "lower_bound", "node_drop_pct",
                    "pivots", "status", "wall_time_s"):
            assert key in payload
        assert payload["status"] == "optimal"

    def test_json_deterministic_modulo_wall_time(self, capsys, pair_files):
        a, b = pair_files
        _, out1, _ = run_cli(capsys, ["dist", a, b, "--s", "20", "--json"])
        _, out2, _ = run_cli(capsys, ["dist", a, b, "--s", "20", "--json"])
        p1, p2 = json.loads(out1), json.loads(out2)
        p1.pop("wall_time_s")
        p2.pop("wall_time_s")
        assert p1 == p2

    def test_usage_error_without_mode(self, pair_files):
        a, b = pair_files
        with pytest.raises(SystemExit) as exc:
            main(["dist", a, b])
        assert exc.value.code == 2

    def test_small_s_requires_best_effort(self, capsys, pair_files):
        a, b = pair_files
        code, _, err = run_cli(capsys, ["dist", a, b, "--s", "1"])
        assert code == 3
        assert "best" in err.lower() or "best_effort" in err
        code2, out, _ = run_cli(capsys, ["dist", a, b, "--s", "1", "--best-effort"])
        assert code2 == 0

    def test_malformed_file_exits_3(self, capsys, tmp_path, pair_files):
        bad = tmp_path / "bad.txt"
        bad.write_text("0 inf\n")
        code, _, err = run_cli(capsys, ["dist", str(bad), pair_files[1], "--s", "20"])
        assert code == 3
        assert "non-finite" in err

    def test_stall_abort_exits_4_and_prints_value(self, capsys, tmp_path):
        rng = np.random.default_rng(193)
        fa = tmp_path / "sa.txt"
        fb = tmp_path / "sb.txt"
        fa.write_text(serialize_diagram(random_diagram(rng, 60, min_points=40)))
        fb.write_text(serialize_diagram(random_diagram(rng, 60, min_points=40)))
        args = ["dist", str(fa), str(fb), "--s", "12", "--stop-c", "0", "--stop-b", "0"]
        code, out, _ = run_cli(capsys, args)
        assert code == 4
        assert float(out.strip()) > 0
        code2, out2, _ = run_cli(capsys, args)
        assert out2 == out  # aborted runs are deterministic too


class TestExact:
    def test_prints_value(self, capsys, pair_files):
        a, b = pair_files
        code, out, _ = run_cli(capsys, ["exact", a, b])
        assert code == 0
        assert float(out.strip()) == pytest.approx(1.0, abs=1e-12)

    def test_bruteforce_size_guard_exits_3(self, capsys, tmp_path):
        fa = tmp_path / "big_a.txt"
        fb = tmp_path / "big_b.txt"
        fa.write_text("".join(f"0 {i + 1}\n" for i in range(13)))
        fb.write_text("".join(f"0 {i + 1}\n" for i in range(13)))
        code, _, err = run_cli(
            capsys, ["exact", str(fa), str(fb), "--method", "bruteforce"]
        )
        assert code == 3
        assert "brute-force" in err

    def test_dense_handles_midsize(self, capsys, tmp_path):
        fa = tmp_path / "mid_a.txt"
        fb = tmp_path / "mid_b.txt"
        fa.write_text("".join(f"0 {i + 1}\n" for i in range(13)))
        fb.write_text("".join(f"0.5 {i + 1.5}\n" for i in range(13)))
        code, out, _ = run_cli(capsys, ["exact", str(fa), str(fb)])
        assert code == 0
        assert float(out.strip()) > 0


class TestLowerBoundCommands:
    def test_rwmd(self, capsys, pair_files):
        a, b = pair_files
        code, out, _ = run_cli(capsys, ["rwmd", a, b])
        assert code == 0
        assert float(out.strip()) == pytest.approx(1.0, abs=1e-12)

    def test_wcd(self, capsys, pair_files):
        a, b = pair_files
        code, out, _ = run_cli(capsys, ["wcd", a, b])
        assert code == 0
        assert float(out.strip()) == pytest.approx(0.3535533905932738, abs=1e-12)


class TestNN:
    def test_finds_duplicate_in_corpus(self, capsys, tmp_path):
        rng = np.random.default_rng(197)
        corpus_dir = tmp_path / "corpus"
        corpus_dir.mkdir()
        diagrams = [random_diagram(rng, 12, min_points=3) for _ in range(6)]
        for i, d in enumerate(diagrams):
            (corpus_dir / f"d{i}.txt").write_text(serialize_diagram(d))
        query = tmp_path / "query.txt"
        query.write_text(serialize_diagram(diagrams[3]))
        code, out, _ = run_cli(
            capsys,
            [
                "nn", str(query), str(corpus_dir),
                "--pipeline", "rwmd:4,pdflow:2@1,pdflow:1@18",
            ],
        )
        assert code == 0
        assert out.strip() == "d3.txt"

    def test_bad_pipeline_exits_2(self, capsys, tmp_path):
        corpus_dir = tmp_path / "corpus"
        corpus_dir.mkdir()
        (corpus_dir / "d0.txt").write_text("0 2\n")
        query = tmp_path / "q.txt"
        query.write_text("0 2\n")
        code, _, err = run_cli(
            capsys, ["nn", str(query), str(corpus_dir), "--pipeline", "pdflow:1"]
        )
        assert code == 2
        assert "pipeline" in err


class TestBench:
    def test_emits_csv_and_pairs(self, capsys, tmp_path):
        out_dir = tmp_path / "pairs"
        code, out, _ = run_cli(
            capsys,
            ["bench", "--points", "60,120", "--seed", "7", "--s", "12",
             "--out-dir", str(out_dir)],
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("points,nodes,arcs")
        assert len(lines) == 3
        assert lines[1].startswith("60,") and lines[2].startswith("120,")
        written = sorted(p.name for p in out_dir.iterdir())
        assert written == ["pair120_a.txt", "pair120_b.txt", "pair60_a.txt", "pair60_b.txt"]
        from w1flow.diagram import load_diagram

        d, dropped = load_diagram(out_dir / "pair60_a.txt")
        assert dropped == 0
        assert len(d) == 30
