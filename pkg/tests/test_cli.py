import json
import os

import pytest

from kurzlab.cli import int_arg, main


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


@pytest.mark.parametrize("s,v", [("1e6", 10**6), ("2^20", 2**20), ("10**7", 10**7), ("1_000", 1000)])
def test_int_arg(s, v):
    assert int_arg(s) == v


def test_stats_json(capsys):
    code, out = run(["sets", "stats", "--set", "s2", "--P", "mod:3,4", "--k", "12"], capsys)
    d = json.loads(out.out)
    assert code == 0 and d["kind"] == "s2" and d["k"] == 12
    assert set(d) >= {"kind", "params", "k", "mu_k", "d_k", "density_ratio", "violations"}


def test_bohr_embed(capsys):
    code, out = run(["bohr", "--alpha", "golden", "--ell", "12", "--t", "1/64", "--embed"], capsys)
    assert code == 0 and json.loads(out.out)["inclusion_ok"] is True


def test_missing_alpha_is_usage_error(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["bohr", "--ell", "12", "--t", "1/64"])
    assert ei.value.code == 2


def test_unknown_flag(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["sets", "member", "--bogus"])
    assert ei.value.code == 2


def test_resource_exit(capsys):
    code, out = run(["bohr", "--alpha", "golden", "--ell", "40", "--t", "1/64"], capsys)
    assert code == 3 and "advice" in out.err


def test_out_and_manifest(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _ = run(["equi", "disc", "--alpha", "golden", "--set", "primes", "--x", "1e4",
                   "--out", str(out)], capsys)
    assert code == 0
    d = json.loads(out.read_text())
    man = json.loads((tmp_path / "r.json.manifest.json").read_text())
    assert d["manifest"] == "r.json.manifest.json"
    assert man["argv"][0] == "equi"
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".tmp")]


def test_csv_output(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _ = run(["correl", "shifted", "--set", "primes", "--k", "8", "--hmax", "6",
                   "--format", "csv", "--out", str(out)], capsys)
    lines = out.read_text().splitlines()
    assert code == 0 and lines[0].startswith("k,h,count,bound")
    assert len(lines) == 7


def test_byte_identical_across_threads(tmp_path, capsys):
    outs = []
    for th in ("1", "3"):
        p = tmp_path / f"m{th}.json"
        run(["exper", "measure", "--alpha", "golden", "--set", "primes", "--psi", "dyadic:2^-k",
             "--N0", "16", "--N", "2e4", "--samples", "50", "--seed", "7", "--threads", th,
             "--out", str(p)], capsys)
        outs.append(p.read_text().replace(p.name, "X"))
    assert outs[0] == outs[1]


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.txt"
    cfg.write_text("# defaults\nalpha = sqrt2\nell = 10\nt = 1/16\n")
    code, out = run(["bohr", "--config", str(cfg), "--ell", "9"], capsys)
    d = json.loads(out.out)
    assert code == 0 and d["alpha"] == "sqrt2" and d["ell"] == 9


def test_counterexample_round_trip_cli(tmp_path, capsys):
    af = tmp_path / "liouville.cf"
    af.write_text("liouville\n")
    art = tmp_path / "art.json"
    code, _ = run(["exper", "counterexample", "--alpha-file", str(af), "--set", "all", "--f", "one",
                   "--K", "4", "--out", str(art)], capsys)
    assert code == 0
    code, out = run(["exper", "verify-artifact", "--artifact", str(art)], capsys)
    assert code == 0 and json.loads(out.out)["ok"] is True


def test_tampered_artifact_exit_4(tmp_path, capsys):
    art = tmp_path / "art.json"
    run(["exper", "counterexample", "--alpha", "liouville", "--K", "3", "--out", str(art)], capsys)
    d = json.loads(art.read_text())
    d["levels"][1]["psi"] = "1/3"
    art.write_text(json.dumps(d))
    code, _ = run(["exper", "verify-artifact", "--artifact", str(art)], capsys)
    assert code == 4


def test_golden_counterexample_reports_status(capsys):
    code, out = run(["exper", "counterexample", "--alpha", "golden", "--f", "log", "--K", "2"], capsys)
    d = json.loads(out.out)
    assert code == 0 and d["status"] == "no qualifying convergent" and d["level"] == 1


def test_crt_alpha(capsys):
    code, out = run(["exper", "crt-alpha", "--K", "5", "--seed", "3"], capsys)
    d = json.loads(out.out)
    assert code == 0 and d["verified"] and len(d["levels"]) == 5
