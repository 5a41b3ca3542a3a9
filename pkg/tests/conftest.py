"""Builds the compiled switching kernel in place once per session when a
toolchain is available; the suite runs on the pure kernel otherwise."""

import os
import subprocess
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(HERE)

sys.path.insert(0, HERE)  # tests import the local `gen` helper module

if not os.environ.get("SMCNETS_NO_BUILD_EXT"):
    try:
        subprocess.run(
            [sys.executable, "setup.py", "build_ext", "--inplace"],
            cwd=ROOT, capture_output=True, timeout=300, check=False,
        )
    except Exception:
        pass
