"""Leading lets the virtual player keep its own motion style.

Both runs face the same 0.25 Hz partner and carry the same desired
velocity profile (a faster 0.5 Hz loop). The follower sacrifices its
style to track the partner; the leader reproduces its own velocity
distribution almost exactly. The gap shows up as the transport distance
between each run's velocity histogram and the desired one.
"""

import math

import numpy as np

from mirrorgame.metrics import Trace
from mirrorgame.session import SessionConfig, run_session
from mirrorgame.signature import emd, velocity_pdf


def main():
    T = 0.03
    t = np.arange(0.0, 60.0, T)
    leader_trace = Trace(t, 0.4 * np.sin(2.0 * math.pi * 0.25 * t))

    w = 2.0 * math.pi * 0.5
    tau = np.arange(0.0, 2.0, T)
    track = {"samples": (0.4 * w * np.cos(w * tau)).tolist(), "T_rec": 2.0}
    desired = velocity_pdf(np.asarray(track["samples"]))

    for mode in ("opc-follower", "opc-leader"):
        log = run_session(SessionConfig(
            mode=mode, T=T, duration=60.0,
            partner={"kind": "recorded", "trace": leader_trace},
            signature=dict(track), start_at_partner=True))
        d = emd(velocity_pdf(log.vp_trace().v), desired)
        print(f"{mode:>13}: distance to desired signature = {d:.4f}")


if __name__ == "__main__":
    main()
