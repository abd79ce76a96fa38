"""Measured ERM gap against the sqrt(n / (c m)) predictor at m = 500 and 5000.

Writes demos/calibration/sim_scaling.json. Takes a few minutes on one core.

Run: python3 demos/sim_scaling.py [--seeds 10] [--threads N]
"""

import argparse
import json
import math
from pathlib import Path

from contrastive_vc import ermsim

parser = argparse.ArgumentParser()
parser.add_argument("--seeds", type=int, default=10)
parser.add_argument("--threads", type=int, default=1)
args = parser.parse_args()

runs = {}
for m in (500, 5000):
    cfg = ermsim.SimConfig(n=50, gt_dim=3, model_dim=3, p=2, eta=0.0, m_train=m,
                           seeds=tuple(range(args.seeds)))
    res = ermsim.run_sim(cfg, args.threads)
    runs[m] = res
    print(f"m={m:5d}: train {res.train_error:.4f} test {res.test_error:.4f} "
          f"gap {res.gap:.4f} predicted {res.predicted_eps:.4f} ratio {res.ratio:.2f}")

factor = runs[500].gap / runs[5000].gap
print(f"gap shrinks by {factor:.2f} for 10x data (sqrt(10) = {math.sqrt(10):.2f})")

record = {
    "factor": factor,
    "factor_band": [math.sqrt(10) / 2, 2 * math.sqrt(10)],
    "ratio_band": [0.1, 10],
    "runs": {str(m): r.to_dict() for m, r in runs.items()},
}
out = Path(__file__).parent / "calibration" / "sim_scaling.json"
out.write_text(json.dumps(record, indent=1, sort_keys=True) + "\n")
print("wrote", out)
