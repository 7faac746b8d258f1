import csv
import io
import json

import numpy as np
import pytest

from crmhe import Weibull, __version__, crmhe, dcrmhe
from crmhe.cli import main
from crmhe.simulation import rng_stream


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def data_file(tmp_path):
    x = Weibull(3.85819, 2.3409).sample(40, rng_stream(12345))
    path = tmp_path / "switch.txt"
    path.write_text("\n".join(repr(float(v)) for v in x))
    return path


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == f"crmhe {__version__} (interface 1.0)"


def test_compute_json_roundtrip(capsys):
    code, out, _ = run(capsys, "compute", "--dist", "weibull", "--params", "5,1", "--alpha", "1.5", "--t", "0,0.5", "--json")
    assert code == 0
    rec = json.loads(out)
    assert rec["command"] == "compute" and rec["version"] == __version__
    assert rec["results"][0]["closed_form"] == crmhe(Weibull(5.0, 1.0), 1.5).value
    assert rec["results"][1]["closed_form"] == dcrmhe(Weibull(5.0, 1.0), 1.5, 0.5).value
    assert abs(rec["results"][0]["difference"]) < 1e-8


def test_compute_csv_roundtrip(capsys):
    code, out, _ = run(capsys, "compute", "--dist", "pareto1", "--params", "1,3", "--alpha", "1.5", "--csv")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["closed_form"]) == 4.0
    assert float(row["tabulated"]) == 2.0


def test_compute_human_table(capsys):
    code, out, _ = run(capsys, "compute", "--dist", "exp", "--params", "2", "--alpha", "0.5")
    assert code == 0
    assert "closed_form" in out.splitlines()[0]


@pytest.mark.parametrize(
    "argv,code,message",
    [
        (["compute", "--dist", "weibull", "--params", "5,1", "--alpha", "1.0"], 2, "alpha must lie in (0,2) excluding 1"),
        (["compute", "--dist", "pareto1", "--params", "1,0.4", "--alpha", "0.5"], 3, "diverges"),
        (["compute", "--dist", "gpd", "--params", "1,1", "--alpha", "1.5"], 3, "diverges"),
        (["compute", "--dist", "gamma", "--params", "1,1", "--alpha", "1.5"], 2, "gamma"),
        (["compute", "--dist", "weibull", "--params", "5,-1", "--alpha", "1.5"], 2, "scale"),
        (["curve", "--dist", "exp", "--params", "1", "--alpha", "1.5", "--t-stop", "1", "--step", "0"], 2, "step"),
        (["simulate", "--dist", "weibull", "--params", "5,1", "--alpha", "1.5", "--n", "30"], 2, "--seed"),
    ],
)
def test_exit_codes(capsys, argv, code, message):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert message in err


def test_fit_error_exit_code(capsys, tmp_path):
    path = tmp_path / "flat.txt"
    path.write_text("2\n2\n2\n2\n2\n2\n")
    code, _, err = run(capsys, "analyze", "--data", str(path), "--alpha", "1.5", "--t", "1", "--seed", "1", "--reps", "10")
    assert code == 4
    assert "equal" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["compute", "--dist", "weibull"])
    assert exc.value.code == 2


def test_estimate_lists_per_t_errors(capsys, data_file):
    code, out, _ = run(capsys, "estimate", "--data", str(data_file), "--alpha", "1.5", "--t", "0,0.9,50", "--csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["error"] == "" and rows[1]["error"] == ""
    assert rows[2]["estimate"] == "" and "TruncationBeyondSupport" in rows[2]["error"]


def test_estimate_kernel_options(capsys, data_file):
    _, out, _ = run(capsys, "estimate", "--data", str(data_file), "--alpha", "0.5", "--kernel", "epanechnikov",
                    "--bandwidth", "0.25", "--grid-points", "1024", "--json")
    rec = json.loads(out)
    row = rec["results"][0]
    assert (row["kernel"], row["bandwidth"], row["bandwidth_rule"], row["grid_points"]) == ("epanechnikov", 0.25, "fixed", 1024)


def test_curve_exponential_constant(capsys):
    _, out, _ = run(capsys, "curve", "--dist", "exp", "--params", "1", "--alpha", "1.5", "--t-stop", "2", "--step", "0.1", "--csv")
    vals = [float(r["theoretical"]) for r in csv.DictReader(io.StringIO(out))]
    assert len(vals) == 21
    assert np.std(vals) < 1e-12


def test_curve_gpd_linear(capsys):
    _, out, _ = run(capsys, "curve", "--dist", "gpd", "--params", "0.5,1", "--alpha", "1.5", "--t-stop", "2", "--step", "0.1", "--json")
    rows = json.loads(out)["results"]
    t = np.array([r["t"] for r in rows])
    v = np.array([r["theoretical"] for r in rows])
    assert t[1] == 0.1 and t[-1] == 2.0
    assert np.max(np.abs(np.diff(v, 2))) < 1e-10


def test_curve_from_data_uses_fitted_weibull(capsys, data_file):
    _, out, _ = run(capsys, "curve", "--data", str(data_file), "--alpha", "1.5", "--t-stop", "1", "--step", "0.5", "--json")
    rec = json.loads(out)
    assert rec["fit"]["family"] == "weibull"
    assert all(r["estimate"] is not None and r["theoretical"] is not None for r in rec["results"])


def test_simulate_plan_file(capsys, tmp_path):
    plan = tmp_path / "plan.txt"
    plan.write_text("family = uniform\nparams = 1.25,1.75\nalpha = 1.5\nn = 30\nreps = 40\nseed = 2\n")
    code, out, _ = run(capsys, "simulate", "--plan", str(plan), "--threads", "1", "--json")
    assert code == 0
    rec = json.loads(out)
    assert rec["seed"] == 2
    row = rec["results"][0]
    assert row["true"] == pytest.approx(7.0 / 6.0)
    assert row["reps"] == 40


def test_seeded_rerun_identical_and_output_file(capsys, tmp_path, data_file):
    argv = ["analyze", "--data", str(data_file), "--alpha", "1.5", "--t", "0.9", "--reps", "60", "--seed", "3", "--threads", "1"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, *argv, "--json", "-o", str(a))[0] == 0
    assert run(capsys, *argv, "--json", "-o", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rec = json.loads(a.read_text())
    assert rec["options"]["resample_size"] == 40
    row = rec["results"][0]
    assert row["bias"] == row["bootstrap_mean"] - row["theoretical"]


def test_config_hash_ignores_threads_and_format(capsys, data_file):
    base = ["analyze", "--data", str(data_file), "--alpha", "1.5", "--t", "0.9", "--reps", "20", "--seed", "3", "--json"]
    h1 = json.loads(run(capsys, *base, "--threads", "1")[1])["config_hash"]
    h2 = json.loads(run(capsys, *base, "--threads", "2")[1])["config_hash"]
    h3 = json.loads(run(capsys, *base[:-1], "--reps", "21", "--json", "--threads", "1")[1])["config_hash"]
    assert h1 == h2 != h3


def test_csv_full_precision(capsys):
    _, out, _ = run(capsys, "compute", "--dist", "weibull", "--params", "3.85819,2.3409", "--alpha", "1.5", "--t", "0.9", "--csv")
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["closed_form"]) == dcrmhe(Weibull(3.85819, 2.3409), 1.5, 0.9).value
