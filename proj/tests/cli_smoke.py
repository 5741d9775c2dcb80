"""End-to-end checks of the onebit CLI: subcommands, file round trips, exit codes."""

import json
import subprocess
import sys
from pathlib import Path


def run(cli, *args):
    return subprocess.run([cli, *args], capture_output=True, text=True)


def expect(cond, msg):
    if not cond:
        print("FAILED:", msg)
        sys.exit(1)


def main():
    cli, work = sys.argv[1], Path(sys.argv[2])
    work.mkdir(parents=True, exist_ok=True)
    cfg = {
        "n": 128,
        "s": 3,
        "m_grid": [100],
        "noise": {"family": "gaussian", "mean": 0.0, "scale": 0.2},
        "lambda_rule": {"rule": "fixed", "value": 1.5},
        "master_seed": 5,
    }
    cfg_path = work / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))

    signs, op, signal = work / "signs.txt", work / "operator.json", work / "signal.txt"
    r = run(cli, "simulate", "-c", str(cfg_path), "--trial", "2", "--emit-signs", str(signs),
            "--emit-operator", str(op), "--emit-signal", str(signal))
    expect(r.returncode == 0, f"simulate: {r.stderr}")
    record = json.loads(r.stdout)
    expect(record["trial"] == 2 and not record["failed"], "simulate record")

    out = work / "xhat.txt"
    r = run(cli, "recover", "--signs", str(signs), "--operator", str(op), "-s", "3", "--lambda", "1.5",
            "-o", str(out))
    expect(r.returncode == 0, f"recover: {r.stderr}")
    parse = lambda p: [float(t) for t in p.read_text().split() if not t.startswith("#")]
    xhat, x = parse(out), parse(signal)
    expect(len(xhat) == 128, "recovered length")
    err = sum((a - b) ** 2 for a, b in zip(xhat, x)) ** 0.5
    expect(abs(err - record["error_l2"]) < 1e-9, f"recover error {err} vs simulate {record['error_l2']}")

    r = run(cli, "diagnose", "-n", "256", "-r", "4", "--trials", "20", "--seed", "3")
    expect(r.returncode == 0, f"diagnose: {r.stderr}")
    report = json.loads(r.stdout)
    for key in ("growth", "isomorphism", "sparse_operator_norm"):
        expect(key in report, f"diagnose key {key}")

    bad = dict(cfg, surprise=1)
    bad_path = work / "bad.json"
    bad_path.write_text(json.dumps(bad))
    expect(run(cli, "sweep", "-c", str(bad_path)).returncode == 2, "unknown key exit code")
    invalid = dict(cfg, m_grid=[500])
    bad_path.write_text(json.dumps(invalid))
    expect(run(cli, "simulate", "-c", str(bad_path)).returncode == 2, "invalid config exit code")
    bad_path.write_text("{ not json")
    expect(run(cli, "sweep", "-c", str(bad_path)).returncode == 2, "malformed json exit code")
    expect(run(cli, "sweep", "-c", str(work / "missing.json")).returncode == 3, "missing config exit code")
    expect(run(cli, "recover", "--signs", str(work / "nope.txt"), "--operator", str(op), "-s", "3",
               "--lambda", "1").returncode == 3, "missing signs exit code")
    print("cli smoke ok")


if __name__ == "__main__":
    main()
