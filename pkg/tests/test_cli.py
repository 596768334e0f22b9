import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from orthoconv.atlas import KoebeSlit, PrimeEndRef, RightHalfPlane
from orthoconv.cli.main import main as cli_main
from orthoconv.cli.config import (
    MAX_CELLS, fmt_complex, normalize, parse_complex, parse_config, parse_corpus, parse_seq,
)
from orthoconv.cli.runner import (
    EXIT_ERROR, EXIT_OK, EXIT_PROPERTY, cell_seed, execute, run, sweep,
)
from orthoconv.errors import ConfigError

CORPUS = Path(__file__).parent / "fixtures" / "corpus.cfg"


class TestParse:
    def test_dist_example(self):
        cfg = parse_config("dist domain=halfplane z=1+0i w=2.718281828+0i")
        assert cfg.command == "dist"
        assert cfg.get("domain") == RightHalfPlane()
        assert cfg.get("z") == 1 and cfg.get("w") == 2.718281828

    def test_classify_example(self):
        text = ("classify inner=koebe_slit{p_re:0,p_im:0} outer=same end=infinity R=1 "
                "seq=vertical{n:50}")
        cfg = parse_config(text)
        assert cfg.get("inner") == KoebeSlit(0)
        assert cfg.get("outer") == "same"
        assert cfg.get("end") == PrimeEndRef.infinity()
        assert cfg.get("seq").n == 50 and cfg.get("seq").kind == "vertical"
        assert parse_config(cfg.serialize()).serialize() == cfg.serialize()

    def test_range_violation(self):
        report = run(parse_config("dist domain=halfplane z=-1+0i w=2"))
        assert report.exit_code == EXIT_ERROR
        assert report.error["code"] == "DOMAIN_VIOLATION"

    def test_complex_literals(self):
        assert parse_complex("1+2i") == 1 + 2j
        assert parse_complex("-3.5e-1-i") == -0.35 - 1j
        assert parse_complex("i") == 1j
        assert parse_complex("-2i") == -2j
        assert parse_complex("4") == 4
        with pytest.raises(ConfigError):
            parse_complex("1+2j")

    @given(st.complex_numbers(max_magnitude=1e12, allow_nan=False, allow_infinity=False))
    def test_complex_roundtrip(self, z):
        assert parse_complex(fmt_complex(z)) == z

    def test_seq(self):
        s = parse_seq("ray{n:10,t_max:1e4,theta:0.5,offset_im:2}")
        assert (s.kind, s.n, s.t_max, s.theta, s.offset) == ("ray", 10, 1e4, 0.5, 2j)
        for bad in ("vertical", "spiral{n:3}", "real{n:1}", "real{t_max:5}", "real{n:3,m:1}"):
            with pytest.raises(ConfigError):
                parse_seq(bad)

    def test_errors_carry_position(self):
        text = "dist domain=halfplane z=1 w=2\n\n  geodesic domain=disc z=0 w=0.5 colour=red"
        with pytest.raises(ConfigError) as exc:
            parse_corpus(text)
        assert (exc.value.line, exc.value.column) == (3, 34)
        with pytest.raises(ConfigError) as exc:
            parse_config("dist domain=halfplane z=1+2j w=2")
        assert (exc.value.line, exc.value.column) == (1, 25)
        with pytest.raises(ConfigError) as exc:
            parse_config("dist domain=sector{beta:0.5,gamma:1} z=1 w=2")
        assert (exc.value.line, exc.value.column) == (1, 29)

    def test_syntax_errors(self):
        for text in ("walk domain=disc", "dist domain=disc z=0", "dist domain=disc z 0 w=1",
                     "dist domain=disc z=0 z=0.1 w=0.2", "dist domain=disc{ z=0 w=0.1",
                     "dist domain=blob z=0 w=0.1", "probe name=step1 beta=-1",
                     "classify inner=halfplane seq=real{n:5} seed=-1"):
            with pytest.raises(ConfigError):
                parse_corpus(text)

    def test_strict_and_lenient(self):
        text = "dist domain=halfplane z=1 w=2 colour=red"
        with pytest.raises(ConfigError):
            parse_config(text)
        cfg = parse_config(text, strict=False)
        assert cfg.ignored == ("colour",)
        assert run(cfg).exit_code == EXIT_OK

    def test_comments_and_blanks(self):
        cfgs = parse_corpus("# header\n\ndist domain=disc z=0 w=0.5  # trailing\n")
        assert len(cfgs) == 1

    def test_corpus_roundtrip(self):
        text = CORPUS.read_text()
        norm = normalize(text)
        assert len(parse_corpus(text)) == 50
        assert normalize(norm) == norm
        for a, b in zip(parse_corpus(text), parse_corpus(norm)):
            assert a.serialize() == b.serialize()
            assert a.sweeps == b.sweeps

    def test_sweep_limits(self):
        with pytest.raises(ConfigError):
            parse_config("probe name=step1 beta=linspace{start:0.1,stop:0.7,n:1000001}")
        with pytest.raises(ConfigError):
            parse_config("qgeo domain=halfplane z=1 w=2 A=linspace{start:1,stop:2,n:2000} "
                         "B=linspace{start:0,stop:3,n:1000}")
        with pytest.raises(ConfigError):
            parse_config("dist domain=halfplane z=1 w=linspace{start:1,stop:3,n:5}")
        with pytest.raises(ConfigError):
            parse_config("qgeo domain=halfplane z=[1;2] w=[3;4] grid=[8;16]")
        cfg = parse_config("qgeo domain=halfplane z=1 w=2 A=[1;2] B=linspace{start:0,stop:1,n:5}")
        assert cfg.grid_size() == 10
        assert MAX_CELLS == 10**6

    def test_sweep_values_range_checked(self):
        with pytest.raises(ConfigError):
            parse_config("probe name=step1 beta=linspace{start:-0.1,stop:0.7,n:5}")


class TestRun:
    def test_dist_row(self):
        report = run(parse_config("dist domain=halfplane z=1+0i w=2.718281828+0i"))
        assert report.exit_code == EXIT_OK
        line = report.csv_text().splitlines()[1]
        assert line.startswith("1+0i,2.718281828+0i,0.4999999999")
        assert float(line.split(",")[-1]) == pytest.approx(0.5, abs=1e-9)

    def test_corollary_case3(self):
        report = run(parse_config("corollary case=3 p=0 starts=(0,0.3+0.3i) mc=2000 seed=1"))
        assert report.exit_code == EXIT_OK
        assert report.summary["slope"] == ["orthogonal", "orthogonal"]
        assert report.flags == {"orthogonal": True}

    def test_control_flag(self):
        report = run(parse_config("corollary case=control starts=(0,0.5)"))
        assert report.exit_code == EXIT_OK
        assert all(a > math.pi / 2 - 0.01 for a in report.summary["tail_angle"])

    def test_scenario_invalid(self):
        text = ("classify inner=shifted_halfplane{a:5} outer=halfplane base=6 R=4 "
                "seq=real{n:20,t_max:1e6,offset_re:5} samples=2000 seed=6")
        report = run(parse_config(text))
        assert report.exit_code == EXIT_ERROR
        assert report.error["code"] == "SCENARIO_INVALID"

    def test_expectation_failure(self):
        text = "classify inner=halfplane seq=real{n:40,t_max:1e6} R=1 expect=tangential seed=1"
        assert run(parse_config(text)).exit_code == EXIT_PROPERTY
        text = "qgeo domain=halfplane curve=segment z=1+1i w=1+50i expect=valid"
        assert run(parse_config(text)).exit_code == EXIT_PROPERTY

    def test_numbers_do_not_change_status(self):
        text = ("classify inner=halfplane seq=ray{n:40,t_max:1e6,theta:1} R=1 samples=1000 seed=3")
        report = run(parse_config(text))
        assert report.summary["verdict"] == "inconclusive"
        assert report.exit_code == EXIT_OK

    def test_monte_carlo_needs_seed(self):
        cfg = parse_config("probe name=step1_mc beta=0.3 n=100")
        report = run(cfg)
        assert report.exit_code == EXIT_ERROR
        assert report.error["code"] == "CONFIG_ERROR"
        assert run(cfg, seed=5).exit_code == EXIT_OK
        assert run(parse_config("probe name=step1 beta=0.3")).exit_code == EXIT_OK

    def test_config_seed_wins(self):
        a = run(parse_config("probe name=step1_mc beta=0.3 n=100 seed=9"), seed=1)
        b = run(parse_config("probe name=step1_mc beta=0.3 n=100"), seed=9)
        assert a.csv_text() == b.csv_text()

    def test_json_summary(self):
        report = run(parse_config("slope omega=halfplane samples=8"))
        doc = json.loads(report.to_json())
        assert doc["command"] == "slope omega=halfplane samples=8"
        assert doc["summary"]["kind"] == "tangential-"
        assert "timestamp" in doc and "version" in doc
        assert "timestamp" not in json.loads(report.to_json(timestamp=False))
        assert "T" not in report.csv_text()


class TestSweep:
    def test_empty_grid(self):
        report = execute(parse_config("dist domain=halfplane z=1 w=[]"))
        assert report.results == []
        assert report.exit_code == EXIT_OK
        assert report.csv_text().splitlines() == ["w,status"]

    def test_step1_decreasing(self):
        report = execute(parse_config("probe name=step1 beta=linspace{start:0.07,stop:0.7,n:10}"))
        lines = report.csv_text().splitlines()
        assert lines[0] == "status,beta,K"
        K = [float(l.split(",")[2]) for l in lines[1:]]
        assert len(K) == 10 and np.all(np.diff(K) > 0)

    def test_tangential_control_column(self):
        text = "slope omega=halfplane t_max=logspace{start:10,stop:1e6,n:6} samples=8"
        report = execute(parse_config(text))
        last = [r.rows[-1][3] for _, r in report.results]
        assert np.all(np.diff(last) < 0)
        assert last[-1] == pytest.approx(-math.pi / 2, abs=1e-5)

    def test_cell_seeds(self):
        assert cell_seed(12, 0) == 12 and cell_seed(12, 5) == 12 ^ 5
        cfg = parse_config("probe name=step1_mc beta=[0.1;0.2;0.3] n=50")
        cells = sweep(cfg, seed=40)
        for i, (values, report) in enumerate(cells):
            single = run(parse_config(f"probe name=step1_mc beta={values['beta']!r} n=50"), 40 ^ i)
            assert single.csv_text() == report.csv_text()

    def test_two_keys_row_major(self):
        report = execute(parse_config("dist domain=halfplane z=[1;2] w=[3;4;5]"))
        assert [v for v, _ in report.results][:2] == [{"z": 1, "w": 3}, {"z": 1, "w": 4}]
        assert len(report.csv_text().splitlines()) == 7

    def test_workers_agree(self):
        cfg = parse_config("probe name=step2_sandwich beta=[0.2;0.5;0.9;1.2] pairs=5 seed=3")
        assert execute(cfg, workers=1).csv_text() == execute(cfg, workers=2).csv_text()


class TestDeterminism:
    def test_same_seed_same_bytes(self):
        text = "probe name=step1_mc beta=[0.1;0.4] n=300"
        a = execute(parse_config(text), seed=7).csv_text()
        b = execute(parse_config(text), seed=7).csv_text()
        c = execute(parse_config(text), seed=8).csv_text()
        assert a == b and a != c

    def test_corpus_twice(self, tmp_path, capsys):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            cli_main(["--config", str(CORPUS), "--out", str(out)])
            outs.append(out)
        files = sorted(p.name for p in outs[0].glob("*.csv"))
        assert len(files) == 50
        for f in files:
            assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()


class TestMain:
    def test_stdout(self, capsys):
        assert cli_main(["dist", "domain=halfplane", "z=1", "w=4"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "z,w,distance"

    def test_error_exit(self, capsys):
        assert cli_main(["dist domain=halfplane z=1"]) == EXIT_ERROR
        assert cli_main([]) == EXIT_ERROR

    def test_strict_flag(self, capsys):
        assert cli_main(["dist domain=halfplane z=1 w=2 colour=red"]) == EXIT_OK
        assert cli_main(["--strict", "dist domain=halfplane z=1 w=2 colour=red"]) == EXIT_ERROR

    def test_max_status(self, tmp_path, capsys):
        cfg = tmp_path / "s.cfg"
        cfg.write_text("dist domain=halfplane z=1 w=2\n"
                       "qgeo domain=halfplane curve=segment z=1+1i w=1+50i expect=valid\n")
        assert cli_main(["--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_PROPERTY
        doc = json.loads((tmp_path / "o" / "scenario_001.json").read_text())
        assert doc["flags"] == {"expectation": False}

    def test_seed_flag(self, capsys):
        assert cli_main(["--seed", "3", "probe name=step1_mc beta=0.3 n=50"]) == EXIT_OK
        assert cli_main(["probe name=step1_mc beta=0.3 n=50"]) == EXIT_ERROR
