"""Tune the classical teleportation gain and sweep the amplifier gain.

Raising the classical gain above the ideal-teleporter value partially buys
back the scissor truncation noise: higher entanglement at every amplifier
setting and a wider error-correction window.  The same sweep is available
from the command line:

    cvqec sweep --scenario fig-gain-tuned --g2-min 4 --g2-max 9 --g2-step 0.5 \
        --lambda-mode optimized --out tuned.csv
"""

import numpy as np

from cvqec import ProtocolParams, geof_of_r, optimize_lambda, r0_lossy_tmsv

preset = dict(eta=0.01, chi=0.5, zeta=0.5, tau=1.0, epsilon=1.0, delta=1.0)
baseline = geof_of_r(r0_lossy_tmsv(preset["zeta"], preset["eta"]))
print(f"uncorrected baseline: {baseline:.6f} ebits")
print(f"{'g^2':>5} {'lambda0':>9} {'lambda*':>9} {'GEOF(l0)':>10} {'GEOF(l*)':>10} {'beats baseline':>15}")
for g2 in (4.0, 5.0, 6.0, 7.0, 8.0):
    p = ProtocolParams(g=np.sqrt(g2), **preset)
    opt = optimize_lambda(p)
    beats = "yes" if opt.geof_opt > baseline else "no"
    print(f"{g2:5.1f} {p.nominal_lambda():9.4f} {opt.lambda_opt:9.4f} "
          f"{opt.geof_at_nominal:10.6f} {opt.geof_opt:10.6f} {beats:>15}")
print("\nthe optimized gain sits a few percent above lambda0 and never loses;")
print("with ideal components the win comes entirely from absorbing truncation noise")
