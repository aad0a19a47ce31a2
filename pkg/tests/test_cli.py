import csv
import io
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcpamap.cli import (
    EXIT_CONFIG,
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_USAGE,
    main,
)
from mcpamap.config import RunConfig, load_config, parse_config, shipped_config
from mcpamap.errors import ConfigParseError
from mcpamap.powermodel import PRESETS

MOTIVATING = "n_pa=2 k=2 powers=20,0,20,0"


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def kv(text):
    return dict(line.split("=", 1) for line in text.splitlines())


class TestEval:
    def test_doherty_value_and_derivatives(self):
        code, text = run(["eval", "--preset", "exp1", "--pout", "20"])
        assert code == EXIT_OK
        d = kv(text)
        assert float(d["p_in_w"]) == pytest.approx(60.55, abs=0.01)
        assert {"d_p_in", "d2_p_in"} <= d.keys()

    def test_sleep_value_has_no_derivatives(self):
        code, text = run(["eval", "--preset", "exp1", "--pout", "0"])
        assert code == EXIT_OK
        assert kv(text) == {"p_in_w": "13"}

    @pytest.mark.parametrize("pout", ["41", "-1", "nan"])
    def test_out_of_domain(self, pout, capsys):
        code, text = run(["eval", "--preset", "exp1", "--pout", pout])
        assert code == EXIT_USAGE
        assert text == ""
        assert "error" in capsys.readouterr().err

    def test_parameter_override(self):
        _, text = run(["eval", "--preset", "exp1", "--p-slp", "7", "--pout", "0"])
        assert kv(text)["p_in_w"] == "7"

    def test_inconsistent_override(self):
        code, _ = run(["eval", "--p-th", "50", "--pout", "1"])
        assert code == EXIT_USAGE

    def test_bad_flag(self):
        assert run(["eval", "--pout"])[0] == EXIT_USAGE
        assert run(["frobnicate"])[0] == EXIT_USAGE


class TestSolve:
    @pytest.mark.parametrize(
        "algo, total, assignment",
        [
            ("static", 121.1, "1,1,2,2"),
            ("exhaustive", 108.1, "1,2,1,2"),
            ("dynamic", 108.1, "1,2,1,2"),
        ],
    )
    def test_motivating_instance(self, algo, total, assignment):
        code, text = run(["solve", "--algo", algo, MOTIVATING, "--preset", "exp1"])
        assert code == EXIT_OK
        d = kv(text)
        assert d["algorithm"] == algo
        assert d["assignment"] == assignment
        assert float(d["total_w"]) == pytest.approx(total, abs=0.2)

    def test_dynamic_matches_exhaustive(self):
        _, dyn = run(["solve", "--algo", "dynamic", MOTIVATING])
        _, exh = run(["solve", "--algo", "exhaustive", MOTIVATING])
        assert kv(dyn)["total_w"] == kv(exh)["total_w"]

    def test_solver_flags(self):
        code, _ = run(["solve", MOTIVATING, "--tol", "1e-6", "--max-iters", "50",
                       "--restarts", "2", "--seed", "3"])
        assert code == EXIT_OK

    @pytest.mark.parametrize(
        "record, algo",
        [
            ("n_pa=1 k=1 powers=3,3", "dynamic"),
            ("n_pa=1 k=2 powers=30,30", "dynamic"),
            ("n_pa=1 k=2 powers=30,30", "exhaustive"),
            ("n_pa=1 k=2 powers=30,30", "static"),
        ],
    )
    def test_infeasible(self, record, algo):
        assert run(["solve", "--algo", algo, record])[0] == EXIT_INFEASIBLE

    def test_resource_limit(self):
        record = "n_pa=4 k=4 powers=" + ",".join(["1"] * 16)
        code, text = run(["solve", "--algo", "exhaustive", "--no-prune", record])
        assert code == EXIT_RESOURCE
        assert text == ""

    @pytest.mark.parametrize("record", ["n_pa=2 powers=1,2", "n_pa=x k=1 powers=1", "junk"])
    def test_malformed_record(self, record):
        assert run(["solve", record])[0] == EXIT_USAGE


GOOD_CFG = """\
# tiny sweep
name = tiny
preset = exp1
n_c = 4
n_pa = 2
capacity = 2
slots = 15   # short
seed = 11
p_grid = 0.25,0.75
profiles = uniform,fixed
algorithms = static,exhaustive
"""


class TestConfig:
    def test_parse(self):
        cfg = parse_config(GOOD_CFG)
        assert cfg.name == "tiny" and cfg.slots == 15
        assert cfg.p_grid == (0.25, 0.75)
        assert cfg.profiles == ("uniform", "fixed")
        assert cfg.model() == PRESETS["exp1"]

    def test_round_trip(self):
        cfg = parse_config(GOOD_CFG)
        assert parse_config(cfg.to_text()) == cfg

    def test_explicit_parameters(self):
        text = "n_c=2\nn_pa=1\ncapacity=2\n" + "".join(
            f"{k} = {getattr(PRESETS['exp3'], k)!r}\n"
            for k in ("alpha", "beta", "gamma", "p_th", "p_max", "p_sta", "p_slp")
        )
        cfg = parse_config(text)
        assert cfg.model() == PRESETS["exp3"]
        assert parse_config(cfg.to_text()) == cfg

    def test_preset_override(self):
        cfg = parse_config("preset = exp1\np_max = 60\nn_c=1\nn_pa=1\ncapacity=1\n")
        assert cfg.model() == PRESETS["exp2"]

    @pytest.mark.parametrize(
        "text, line",
        [
            ("n_c = 6\nbogus\n", 2),
            ("n_c = 6\nn_c = 7\n", 2),
            ("# c\n\ncolour = red\n", 3),
            ("slots = many\n", 1),
            ("p_grid = 0.1,x\n", 1),
            ("profiles = poisson\n", 1),
            ("algorithms = greedy\n", 1),
            ("n_pa =\n", 1),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(ConfigParseError) as info:
            parse_config(text)
        assert info.value.line == line
        assert str(info.value).startswith(f"line {line}:")

    @pytest.mark.parametrize(
        "text",
        [
            "n_pa=3\ncapacity=2\npreset=exp1\n",                  # missing n_c
            "n_c=7\nn_pa=3\ncapacity=2\npreset=exp1\n",           # does not fit
            "n_c=6\nn_pa=3\ncapacity=2\npreset=exp9\n",           # unknown preset
            "n_c=6\nn_pa=3\ncapacity=2\nalpha=2\n",               # incomplete model
            "n_c=6\nn_pa=3\ncapacity=2\npreset=exp1\nslots=0\n",  # bad experiment
        ],
    )
    def test_semantic_errors(self, text):
        with pytest.raises(ConfigParseError):
            parse_config(text)

    @pytest.mark.parametrize("name", ["exp1", "exp2", "exp2b", "exp3"])
    def test_shipped_configs(self, name):
        cfg = load_config(name)
        assert shipped_config(name + ".cfg") is not None
        assert parse_config(cfg.to_text()) == cfg
        assert cfg.slots == 10_000
        assert len(cfg.p_grid) * len(cfg.profiles) * len(cfg.algorithms) == 81

    def test_shipped_geometry(self):
        assert (load_config("exp2").n_c, load_config("exp2").capacity) == (9, 3)
        assert load_config("exp2").model().p_max == 60
        assert (load_config("exp2b").n_c, load_config("exp2b").n_pa) == (12, 4)
        assert load_config("exp3").model() == PRESETS["exp3"]

    def test_missing_file(self):
        with pytest.raises(ConfigParseError):
            load_config("/nonexistent/x.cfg")


@st.composite
def run_configs(draw):
    n_pa = draw(st.integers(1, 4))
    capacity = draw(st.integers(1, 3))
    return RunConfig(
        n_c=draw(st.integers(0, n_pa * capacity)),
        n_pa=n_pa,
        capacity=capacity,
        name=draw(st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True)),
        preset=draw(st.sampled_from(sorted(PRESETS))),
        slots=draw(st.integers(1, 10**6)),
        seed=draw(st.integers(0, 2**32)),
        p_grid=tuple(draw(st.lists(st.floats(0, 1), min_size=1, max_size=5))),
        profiles=tuple(draw(st.lists(st.sampled_from(["fixed", "uniform", "truncgauss"]),
                                     min_size=1, max_size=3))),
        gaussian_spread=draw(st.sampled_from(["variance", "stddev"])),
        tol=draw(st.floats(1e-12, 1e-2)),
        restarts=draw(st.integers(1, 9)),
    )


@settings(max_examples=50, deadline=None)
@given(run_configs())
def test_round_trip_property(cfg):
    assert parse_config(cfg.to_text()) == cfg


class TestSweep:
    @pytest.fixture
    def cfg_path(self, tmp_path):
        path = tmp_path / "tiny.cfg"
        path.write_text(GOOD_CFG)
        return path

    def test_stdout_csv(self, cfg_path):
        code, text = run(["sweep", str(cfg_path), "--out", "-", "-q"])
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(text)))
        assert len(rows) == 1 + 2 * 2 * 2
        assert rows[1][0] == "tiny"

    def test_file_is_deterministic(self, cfg_path, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(["sweep", str(cfg_path), "--out", str(a)])[0] == EXIT_OK
        assert run(["sweep", str(cfg_path), "--out", str(b)])[0] == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_global_flags_override(self, cfg_path):
        _, text = run(["sweep", str(cfg_path), "--out", "-", "-q", "--slots", "3",
                       "--seed", "5", "--preset", "exp3"])
        row = next(iter(csv.DictReader(io.StringIO(text))))
        assert (row["slots"], row["seed"]) == ("3", "5")
        _, exp1 = run(["sweep", str(cfg_path), "--out", "-", "-q", "--slots", "3",
                       "--seed", "5"])
        assert exp1 != text

    def test_shipped_exp1_grid(self):
        code, text = run(["sweep", "exp1", "--slots", "2", "--out", "-", "-q"])
        assert code == EXIT_OK
        assert len(text.splitlines()) == 1 + 81

    def test_parse_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("n_c = 6\nn_c = 6\n")
        code, text = run(["sweep", str(bad)])
        assert code == EXIT_CONFIG
        assert text == ""
        assert "line 2" in capsys.readouterr().err

    def test_diagnostics_on_stderr_only(self, cfg_path, capsys):
        _, text = run(["sweep", str(cfg_path), "--out", "-"])
        assert text.startswith("experiment,")
        assert "wrote" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mcpamap", "solve", MOTIVATING, "--algo", "exhaustive"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "total_w=108.098" in proc.stdout
    assert "examined" in proc.stderr
