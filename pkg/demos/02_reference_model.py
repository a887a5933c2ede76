"""
Reference model step response
=============================

The second-order reference model, realized in state space and stepped with
RK4, against its closed-form response.
"""

import numpy as np

from wristmrac import lti

tf = lti.reference_transfer_function()
k, zeta, wn = lti.second_order_parameters(tf)
print(f"DC gain {k:.3f}, damping {zeta:.4f}, natural frequency {wn:.4f} rad/s")

sys = lti.realize(tf, 1e-3)
print("A =\n", sys.A)

t, y = lti.step_response(sys, 10.0)
exact = lti.analytic_step_response(tf, t)
print(f"max |RK4 - analytic| over 10 s: {np.max(np.abs(y - exact)):.2e}")

for tq in (0.5, 1.0, 2.0, 5.0, 10.0):
    i = int(round(tq / sys.dt))
    print(f"t = {tq:4.1f} s   y = {y[i]: .6f}")

# Peak of the underdamped response
i_peak = np.argmin(y)
print(f"peak {y[i_peak]:.5f} at t = {t[i_peak]:.3f} s")
