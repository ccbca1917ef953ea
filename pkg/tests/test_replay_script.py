import importlib.util
import subprocess
import sys
from pathlib import Path

SCRIPT = Path(__file__).resolve().parents[1] / "scripts" / "contradiction_replay.py"


def _load():
    spec = importlib.util.spec_from_file_location("contradiction_replay", SCRIPT)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def test_replay_flattens_the_warping_function():
    before, after, resid = _load().replay(seed=0, k=2, points=12)
    assert before > 0.5
    assert after < 1e-6
    assert resid < 1e-6


def test_replay_cli_runs():
    proc = subprocess.run([sys.executable, str(SCRIPT), "--points", "12", "--k", "3"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and proc.stdout.strip()
