"""End-to-end verification workflow through the command-line interface.

Writes a model-spec file, asks for the predicted asymptotics, then runs the
Monte Carlo verify command that gates on agreement between the simulated
convergence table and the predicted coefficient. Exit code 5 would signal a
failed verification, so the same invocation can gate a CI job.
"""

import json
import pathlib
import tempfile

from smalltime import cli

spec = {
    "model": {"S0": 1.0, "r": 0.0, "sigma": 0.2,
              "jumps": {"type": "density", "family": "normal",
                        "intensity": 1.0, "mean": 0.0, "std": 0.4}},
    "query": {"strike": 1.2, "t_grid": [0.001, 0.003, 0.01, 0.03]},
    "sim": {"n_paths": 1_000_000, "master_seed": 0},
}

workdir = pathlib.Path(tempfile.mkdtemp())
spec_path = workdir / "merton.json"
spec_path.write_text(json.dumps(spec, indent=2))
print("spec file:", spec_path)

print("\n$ smalltime asymptotics --spec merton.json")
cli.main(["asymptotics", "--spec", str(spec_path)])

print("\n$ smalltime verify --spec merton.json --format csv")
code = cli.main(["verify", "--spec", str(spec_path), "--format", "csv"])
print("exit code:", code)

print("\n$ smalltime verify --spec merton.json   (JSON verdict)")
out = workdir / "verdict.json"
code = cli.main(["verify", "--spec", str(spec_path), "--out", str(out)])
verdict = json.loads(out.read_text())
print("exit code:", code, " verdict:", verdict["verdict"],
      " predicted:", verdict["predicted"],
      " smallest-t ratio:", verdict["smallest_t_ratio"])

print("\n$ smalltime simulate --spec merton.json --t 0.01 --strike 1.0")
cli.main(["simulate", "--spec", str(spec_path), "--t", "0.01",
          "--strike", "1.0"])
