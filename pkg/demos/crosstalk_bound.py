#!/usr/bin/env python3
"""
Bounding cross-talk on the idle ion
===================================

While one ion is driven through its micromotion sideband, the ion
parked at the RF null still sees a weak residual field.  Repeating an
alternating +x/-x pulse sequence on the addressed ion amplifies that
residual drive coherently, so the spectator's return probability decays
with the pulse count N.  Fitting

    F(N) = 1/2 * (1 + (2 p0 - 1) * exp(-2 C N))

turns the decay into a per-gate error bound C and a SPAM floor p0.
"""

import math

from ionreg import (
    NoiseConfig,
    RABI_RATE_CONFIG1,
    crosstalk_per_gate,
    fit_crosstalk_decay,
    run_crosstalk_experiment,
    spectator_rate_for_crosstalk,
)

C_TARGET = 1.2e-3
P0 = 0.96
SHOTS = 100
N_LIST = [0, 50, 100, 150, 200, 300, 400, 500, 650, 800, 1000]


def main():
    eps = 1.0 - math.sqrt(P0)
    omega_na = spectator_rate_for_crosstalk(C_TARGET, RABI_RATE_CONFIG1)
    print("spectator Rabi rate %.1f rad/s (ratio %.2e of the addressed drive)"
          % (omega_na, omega_na / RABI_RATE_CONFIG1))
    print("implied per-gate error C = %.3e" % crosstalk_per_gate(omega_na, RABI_RATE_CONFIG1))

    noise = NoiseConfig(omega_na=omega_na, eps1=eps, eps2=eps, seed=11)
    data = run_crosstalk_experiment(N_LIST, noise, shots=SHOTS, sequences_per_point=8)

    print("\n   N    F(two-ion)  sigma")
    for n, f, s in zip(data.n, data.fidelity, data.sigma):
        print("%5d   %.4f      %.4f" % (n, f, s))

    params, result = fit_crosstalk_decay(data.n, data.fidelity, sigma=data.sigma)
    s_p0, s_c = result.sigmas
    print("\nfit: p0 = %.4f +- %.4f   (true %.4f)" % (params["p0"], s_p0, P0))
    print("     C  = %.3e +- %.1e (true %.3e)" % (params["C"], s_c, C_TARGET))

    # the same sequence with the spectator removed isolates pure SPAM
    single = run_crosstalk_experiment(
        [0, 200, 1000], NoiseConfig(eps1=eps, eps2=eps), experiment="single-ion")
    print("\nsingle-ion control (exact): F =",
          ", ".join("%.4f" % f for f in single.fidelity),
          " -- flat at 1 - eps, no decay")


if __name__ == "__main__":
    main()
