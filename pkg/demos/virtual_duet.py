"""Two virtual players improvise together.

A style-weighted leader (low position weight) and a tracking-weighted
follower (high position weight) are coupled tick-for-tick, each seeing
the other's previous position. The follower locks onto the leader while
the leader keeps expressing its own velocity loop.
"""

import math

import numpy as np

from mirrorgame.metrics import compute_report
from mirrorgame.session import SessionConfig, run_vp_vs_vp


def main():
    T = 0.03
    tau = np.arange(0.0, 4.0, T)
    leader_sig = {"samples": (0.6 * np.sin(
        2.0 * math.pi * tau / 4.0)).tolist(), "T_rec": 4.0}

    leader = SessionConfig(mode="opc-custom", controller={"theta_p": 0.43},
                           T=T, duration=60.0, signature=leader_sig)
    follower = SessionConfig(mode="opc-custom", controller={"theta_p": 0.92},
                             T=T, duration=60.0, signature=dict(leader_sig))
    log_l, log_f = run_vp_vs_vp(leader, follower)

    rep = compute_report(log_l.vp_trace(), log_f.vp_trace())
    print(f"RMS distance       : {rep.rms:.4f}")
    print(f"phase locking (CV) : {rep.cv:.4f}")
    print(f"time lag           : {rep.tl_seconds:+.2f} s "
          "(positive: the follower trails)")


if __name__ == "__main__":
    main()
