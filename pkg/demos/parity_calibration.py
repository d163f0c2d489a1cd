#!/usr/bin/env python3
"""
Calibrating the single-qubit/entangling phase frame with a parity fringe
========================================================================

The entangling gate and the single-ion pulses are generated by different
synthesizer channels, so the rotation-axis azimuth of the single-ion
pulses carries an unknown offset relative to the entangling gate's
phase-sum frame.  Preparing an entangled pair and scanning the analysis
pulses' phase produces a parity fringe whose negative-slope zero
crossing sits exactly at that offset; re-programming the synthesizer by
the fitted value closes the loop.

The demo injects a handful of known offsets and shows the round trip,
exact and shot-sampled.
"""

import math

import numpy as np

from ionreg import NoiseConfig, calibrate_phase_offset, parity_scan

OFFSETS_DEG = (-30.0, 0.0, 10.0, 45.0)
SHOTS = 200
SEED = 7


def main():
    grid = np.linspace(-0.5 * math.pi, 0.5 * math.pi, 37)

    print("fringe check: with zero offset the parity is -sin(2 phi)")
    phis = np.array([-0.25 * math.pi, -0.125 * math.pi, 0.0, 0.125 * math.pi])
    _, vals, _ = parity_scan(phis, NoiseConfig())
    for phi, v in zip(phis, vals):
        print("  phi = %+6.3f rad   parity %+.4f   (-sin(2 phi) = %+.4f)"
              % (phi, v, -math.sin(2 * phi)))

    print("\ninjected   exact recovery      sampled recovery (%d shots)" % SHOTS)
    for deg in OFFSETS_DEG:
        off = math.radians(deg)
        base = dict(phi_offset=off, eps1=0.02, eps2=0.02, p_dep=0.007)
        exact = calibrate_phase_offset(grid, NoiseConfig(**base))
        sampled = calibrate_phase_offset(grid, NoiseConfig(**base, seed=SEED), shots=SHOTS)
        print("%+6.1f deg   %+7.3f deg         %+7.3f +- %.2f deg"
              % (deg, math.degrees(exact.phi_offset),
                 math.degrees(sampled.phi_offset), math.degrees(sampled.sigma)))

    print("\nthe sampled uncertainty sits at the degree scale -- good enough to")
    print("re-zero the synthesizer between benchmark runs")


if __name__ == "__main__":
    main()
