import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize("name,expect", [
    ("reproduce_region.py", '"inside-not-converged": 0'),
    ("quadratic_example.py", "converged 500/500"),
    ("control_sweep.py", "gain,radius,closed_loop_radius"),
])
def test_script_runs(name, expect):
    done = subprocess.run([sys.executable, str(SCRIPTS / name)], capture_output=True, text=True, timeout=120)
    assert done.returncode == 0, done.stderr
    assert expect in done.stdout
