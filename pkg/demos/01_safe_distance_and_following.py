"""Safe-following distance and the constant-ratio following controller.

A follower placed at 1.1 times the safe distance behind a leader keeps its
safety ratio constant while the leader speeds up and slows down, and the
gap settles at the ratio times one vehicle length once the speeds match.

Run:  python3 demos/01_safe_distance_and_following.py
"""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from vehstring import RoadParams, safe_following_distance, simulate_unsaturated_pair


def leader_accel(t: float) -> float:
    if t < 4.0:
        return -2.0
    if t < 9.0:
        return 1.2
    return 0.0


def main() -> None:
    road = RoadParams()
    v_lead0, v_fol0 = 12.0, 14.0
    D = safe_following_distance(v_lead0, v_fol0, road)
    print(f"safe distance for ({v_lead0}, {v_fol0}) m/s: {D:.3f} m")

    out = simulate_unsaturated_pair(
        leader_accel, 0.0, v_lead0, -1.1 * D, v_fol0, road, t_end=40.0
    )
    sigma = out["sigma"]
    gap = out["x_lead"] - out["x_fol"]
    print(f"safety ratio: starts at {sigma[0]:.4f}, "
          f"drifts by at most {np.abs(sigma - sigma[0]).max():.2e}")
    print(f"final gap {gap[-1]:.3f} m vs ratio * length = {sigma[0] * road.L:.3f} m")

    fig, axes = plt.subplots(3, 1, figsize=(8, 8), sharex=True)
    axes[0].plot(out["t"], out["v_lead"], label="leader")
    axes[0].plot(out["t"], out["v_fol"], label="follower")
    axes[0].set_ylabel("speed [m/s]")
    axes[0].legend()
    axes[1].plot(out["t"], sigma)
    axes[1].set_ylabel("safety ratio")
    axes[2].plot(out["t"], gap)
    axes[2].axhline(sigma[0] * road.L, ls="--", c="gray")
    axes[2].set_ylabel("gap [m]")
    axes[2].set_xlabel("time [s]")
    os.makedirs("demos/output", exist_ok=True)
    fig.savefig("demos/output/01_following.png", dpi=120, bbox_inches="tight")
    print("wrote demos/output/01_following.png")


if __name__ == "__main__":
    main()
