"""
Closed-loop tracking in four directions
=======================================

The trained network drives the tendon pair of each motion direction and the
three tracking metrics are reported per direction and on average.
"""

from wristmrac import metrics, pipeline
from wristmrac.config import Config
from wristmrac.loop import Direction

cfg = Config()
result = pipeline.run_pipeline(cfg)

print("direction   rmse_m      settling_s  ss_error_m")
for direction, m in result["metrics"].items():
    print(f"{direction.value:<10}  {m.rmse:.3e}   {m.settling_time:.3f}       {m.steady_state_error:.2e}")
avg = metrics.average(result["metrics"].values())
print(f"{'average':<10}  {avg.rmse:.3e}   {avg.settling_time:.3f}       {avg.steady_state_error:.2e}")

# A few samples of the ulnar response
trace = result["traces"][Direction.ULNAR]
for k in range(0, len(trace), 2000):
    print(f"t = {trace.t[k]:4.1f}  y_ref = {trace.y_ref[k]:.5f}  y_plant = {trace.y_plant[k]:.5f}  "
          f"tendons = {trace.tendons[k].round(3)}")
