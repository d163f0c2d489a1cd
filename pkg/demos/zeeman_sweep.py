#!/usr/bin/env python3
"""
Mapping benchmark fidelity against residual qubit-frequency shifts
==================================================================

During an addressing pulse the off-resonant microwave field shifts
both qubit frequencies (an ac-Zeeman effect); imperfect ion placement
changes those shifts and detunes every subsequent pulse.  This demo
models the shift of each ion in each addressing configuration as a
smooth bowl over the placement errors (dx, dy), scales the bowl until
the simulated benchmark returns a chosen composite fidelity at the
origin, and then sweeps the placement plane to show how sharply the
fidelity falls off.

Runtime is dominated by one benchmark run per grid point (~20 s for
the default 9 x 7 grid).  --plot saves zeeman_sweep.png.
"""

import argparse
import math
import pathlib
import time

import numpy as np

from ionreg import CBConfig, NoiseConfig, ShiftModel, find_shift_scale, zeeman_sweep

TWO_PI = 2.0 * math.pi
TARGET = 0.966

# per-ion shift slopes at the two addressing configurations, rad/s
FLOORS = ((TWO_PI * 4.4e3, -TWO_PI * 2.2e3), (-TWO_PI * 2.8e3, TWO_PI * 5.6e3))


def main():
    parser = argparse.ArgumentParser(description="fidelity vs ion-placement error")
    parser.add_argument("--plot", action="store_true", help="save zeeman_sweep.png")
    args = parser.parse_args()

    amps = tuple(tuple(0.4 * a for a in row) for row in FLOORS)
    model = ShiftModel.quadratic_bowl(amps, floors=FLOORS)
    cfg = CBConfig(dressings_per_basis=6, seed=2)
    noise = NoiseConfig(p_dep=0.006)

    t0 = time.time()
    scale, f_at = find_shift_scale(model, cfg, noise, target=TARGET, hi=0.18, tol=2e-3)
    print("bisected shift scale %.5f gives F(0, 0) = %.4f  (%.1f s)"
          % (scale, f_at, time.time() - t0))

    dx = np.linspace(-0.6, 0.6, 9)
    dy = np.linspace(-0.04, 0.04, 7)
    t0 = time.time()
    swept = zeeman_sweep(dx, dy, model.scaled(scale), cfg, noise, contour_level=TARGET)
    print("swept %d x %d placement grid in %.1f s" % (len(dx), len(dy), time.time() - t0))
    print("closed %.1f%% contour: %s" % (100 * TARGET, swept.contour_closed))

    print("\nfidelity map (rows: dy in um, top = +; columns: dx in um)")
    print("        " + "".join("%7.2f" % x for x in dx))
    for j in range(len(dy) - 1, -1, -1):
        row = "".join("%7.3f" % swept.fidelity[i, j] for i in range(len(dx)))
        print("%+7.3f %s" % (dy[j], row))

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        mesh = ax.pcolormesh(dx, dy, swept.fidelity.T, shading="nearest")
        ax.contour(dx, dy, swept.fidelity.T, levels=[TARGET], colors="w")
        fig.colorbar(mesh, ax=ax, label="composite fidelity")
        ax.set_xlabel("dx (um)")
        ax.set_ylabel("dy (um)")
        out = pathlib.Path(__file__).with_name("zeeman_sweep.png")
        fig.tight_layout()
        fig.savefig(out, dpi=150)
        print("wrote", out)


if __name__ == "__main__":
    main()
