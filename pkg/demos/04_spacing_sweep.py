"""Trade-off between starting early and crossing quickly.

The aggressiveness parameter spreads the prescribed approach times: at one
extreme every vehicle gets its own slot (late start, short occupancy per
vehicle), at the other the whole group is told to arrive together and the
followers pack up behind the first vehicle (early start, long occupancy).

Run:  python3 demos/04_spacing_sweep.py
"""
import dataclasses
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from vehstring import RoadParams, random_scenario, run


def main() -> None:
    road = RoadParams()
    base = random_scenario(road, 8, seed=21, A=1.0)
    grid = np.linspace(0.0, 1.0, 11)
    tau1, occ, fuel = [], [], []
    for A in grid:
        _, summary = run(dataclasses.replace(base, A=float(A)))
        tau1.append(summary.taus[0])
        occ.append(summary.tau_occ)
        fuel.append(summary.fuel_total)
        print(f"A = {A:4.2f}: first approach {summary.taus[0]:6.3f} s, "
              f"occupancy {summary.tau_occ:6.3f} s, fuel {summary.fuel_total:6.3f}")

    fig, ax1 = plt.subplots(figsize=(8, 5))
    ax1.plot(grid, tau1, "o-", label="first approach time")
    ax1.plot(grid, occ, "s-", label="occupancy time")
    ax1.set_xlabel("spacing aggressiveness")
    ax1.set_ylabel("time [s]")
    ax1.legend(loc="center left")
    ax2 = ax1.twinx()
    ax2.plot(grid, fuel, "^--", c="gray", label="fuel")
    ax2.set_ylabel("fuel [m/s]")
    ax2.legend(loc="center right")
    os.makedirs("demos/output", exist_ok=True)
    fig.savefig("demos/output/04_sweep.png", dpi=120, bbox_inches="tight")
    print("wrote demos/output/04_sweep.png")


if __name__ == "__main__":
    main()
