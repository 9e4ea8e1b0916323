#!/usr/bin/env python3
"""Tabulate the stability radius along the scale for a random operator.

Prints theta*, the division constant eta(theta*), the inverse-norm upper
bracket, and the resulting neighbourhood radius, for both functor families.

Run:  python3 scripts/radius_profile.py [seed]
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from interpol_lab.functors import FunctorFamily
from interpol_lab.sampling import random_invertible_instance
from interpol_lab.stability import stability_radius

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 42
rng = np.random.default_rng(seed)
T = random_invertible_instance(rng, dims=(3, 3), weight_span=3.0)

print(f"seed {seed}: dim-3 operator, weights in [e^-3, e^3]")
for fam in (FunctorFamily("calderon"), FunctorFamily("real", 2.0)):
    print(f"-- {fam.label()}")
    print(f"{'theta*':>8} {'eta':>10} {'inv_norm':>12} {'radius':>10}")
    for theta in np.arange(0.1, 1.0, 0.1):
        b = stability_radius(T, fam, float(theta))
        print(f"{theta:8.2f} {b.delta_or_eta:10.4f} {b.inv_norm:12.4e} {b.radius:10.6f}")
