#!/usr/bin/env python3
"""Sweep the dim-2 shear example across theta and print the profile.

Writes out/shear/report.json and sweep.csv; the inverse-norm column shows
the e^{8 theta}-scale growth that makes the neighbourhood radii shrink near
theta = 1 while the factor-2 verdict stays green.

Run:  python3 scripts/run_shear_sweep.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from interpol_lab.cli import main

if __name__ == "__main__":
    code = main(["sweep", "--config", "configs/shear_sweep.yaml", "--emit-plot-data"])
    print(f"exit code {code}")
    sys.exit(code)
