"""
MIT-rule MRAC and the training dataset
======================================

A matched first-order pair shows the adaptive gain converging to its ideal
value. The wrist plant run under the default config then produces the
dataset used to train the network.
"""

from wristmrac import lti, mrac, pipeline
from wristmrac.config import Config

# Matched first-order plant and model: the ideal gain is 1.
def first_order():
    return lti.realize(lti.TransferFunction((1.0,), (1.0, 1.0)), 1e-3)


records = mrac.run_mrac(first_order(), first_order(), mrac.square_wave(1.0, 10.0), gamma=2.0, duration=50.0)
for rec in records[::10_000]:
    print(f"t = {rec.t:5.1f}  theta = {rec.theta:.5f}  e = {rec.e: .2e}")

# Wrist plant driven toward a 30 degree ulnar bend.
cfg = Config()
records = pipeline.generate_dataset(cfg)
cols = mrac.dataset_arrays(records)
print(f"{len(records)} records, commanded deflection {cols['r'][0]:.5f} m")
print(f"final y_plant {cols['y_plant'][-1]:.5f} m, theta {cols['theta'][-1]:.3f} N/m")
print(f"force range {cols['u_force_N'].min():.3f} .. {cols['u_force_N'].max():.3f} N")
