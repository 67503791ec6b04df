"""Shapes of the minimum-fuel velocity plans for a timed arrival.

The planner covers a fixed distance in a fixed horizon while ending at or
above the minimum approach speed.  Depending on how tight the deadline is,
the optimal profile cruises, brakes and holds, dips and respeeds, or
accelerates; its cost is the total variation of the speed.

Run:  python3 demos/02_minimum_fuel_plans.py
"""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from vehstring import RoadParams, feasibility, plan


def main() -> None:
    road = RoadParams()
    v, h = 14.0, 6.0
    window = feasibility(1.0, v, h, road)
    print(f"start speed {v} m/s, horizon {h} s: "
          f"reachable distances [{window.d_min:.2f}, {window.d_max:.2f}] m")

    fig, ax = plt.subplots(figsize=(8, 5))
    for frac, label in [(0.02, "dip and respeed"), (0.35, "brake and hold"),
                        (0.62, "near cruise"), (0.95, "hurry")]:
        d = window.d_min + frac * (window.d_max - window.d_min)
        p = plan(d, v, h, road)
        pts = np.array(p.breakpoints())
        ax.plot(pts[:, 0], pts[:, 1], marker="o",
                label=f"{label}: d={d:.1f} m, cost={p.cost:.2f} m/s")
        print(f"d = {d:7.2f} m -> cost {p.cost:6.3f}, "
              f"terminal speed {p.terminal_speed:.3f} m/s, {label}")
    ax.axhline(road.vnom, ls="--", c="gray", label="minimum approach speed")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("planned speed [m/s]")
    ax.legend()
    os.makedirs("demos/output", exist_ok=True)
    fig.savefig("demos/output/02_plans.png", dpi=120, bbox_inches="tight")
    print("wrote demos/output/02_plans.png")


if __name__ == "__main__":
    main()
