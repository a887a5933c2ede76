"""
Levenberg-Marquardt training
============================

Fit the 2-5-5-7-1 network to the MRAC force and check its Jacobian.
"""

import numpy as np

from wristmrac import gradcheck, nn, pipeline
from wristmrac.config import Config

cfg = Config()
data = pipeline.training_set(cfg, pipeline.generate_dataset(cfg))
print(f"{len(data)} samples, inputs {cfg['nn']['inputs']}")

net, report = pipeline.train(cfg, data)
print(f"stopped after {report.epochs} epochs ({report.stop_reason}), lambda {report.final_lambda:.1e}")
print(f"mse train {report.train_mse:.2e}  val {report.val_mse:.2e}  test {report.test_mse:.2e}")
print("regression:", nn.evaluate_regression(net, data))

# Loss curve, every 100 accepted steps
for epoch in range(0, len(report.history), 100):
    print(f"epoch {epoch:4d}  sse {report.history[epoch]:.3e}")

# Reverse-mode Jacobian against finite differences
rng = np.random.default_rng(0)
print("max relative Jacobian error:", gradcheck.check(net, rng.uniform(0, 1, size=(5, 2))))
