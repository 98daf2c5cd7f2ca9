"""Cost curves J(ell) under good and poor bandwidth choices.

Writes one CSV with a column per setting and prints each curve's spread and
minimiser. Settings are relative to the critical frequency w* at 2 km.
"""

import argparse
import math

import numpy as np

from faultloc import csvio, table1_config
from faultloc.estimate import sweep_cost
from faultloc.simulate import synthesize_output
from faultloc.spectrum import magnitude_spectrum, sigma_for_bandwidth
from faultloc.xferfn import critical_frequency


def spectrum(sys_, sigma, T_s, n, ell):
    return magnitude_spectrum(synthesize_output(sys_, ell, n * T_s / 2, sigma, T_s, n))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="cost_landscape.csv")
    p.add_argument("--ell-true", type=float, default=2000.0)
    args = p.parse_args()

    sys_ = table1_config().system
    w_star = critical_frequency(sys_, args.ell_true)
    T_s = math.pi / (100 * w_star)
    ells = np.arange(500.0, 4001.0, 10.0)

    good_sigma = sigma_for_bandwidth(10 * w_star)
    narrow_sigma = sigma_for_bandwidth(0.1 * w_star)
    good = spectrum(sys_, good_sigma, T_s, 8192, args.ell_true)
    narrow = spectrum(sys_, narrow_sigma, T_s, 16384, args.ell_true)
    curves = {
        "compliant": sweep_cost(ells, good, sys_, good_sigma),
        "narrow_fault": sweep_cost(ells, narrow, sys_, narrow_sigma),
        "low_cut": sweep_cost(ells, good, sys_, good_sigma, omega_cut=w_star),
    }

    print(f"w* = {w_star:.5g} rad/s, T_s = {T_s:.4g} s")
    for name, c in curves.items():
        print(f"{name:13s} spread = {c.spread:7.3f}  argmin = {c.argmin:g} m  min/max = {c.costs.min() / c.costs.max():.2e}")
    rows = np.column_stack([ells] + [c.costs for c in curves.values()])
    csvio.write_table(args.out, ["ell_m", *curves], rows, {"omega_star": w_star, "T_s": T_s})


if __name__ == "__main__":
    main()
