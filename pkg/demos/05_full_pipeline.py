"""The whole experiment pipeline, config-driven, end to end.

Equivalent to the CLI sequence

    rankcut sweep     --config data/synthetic/config.json
    rankcut oracle    --config ...
    rankcut targets   --config ...
    rankcut features  --config ...
    rankcut truncate  --config ... --method fixed_k --k 10   (20, 100)
    rankcut truncate  --config ... --method greedy_k --beta 0  (1, 2)
    rankcut truncate  --config ... --method surprise
    rankcut evaluate  --config ... out/predictions/*.tsv predictions/demo_trained.tsv
    rankcut plotdata  --config ... --svg out/predictions/*.tsv

and prints the resulting comparison table.
"""

import time
from pathlib import Path

from rankcut import harness

DATA = Path(__file__).resolve().parent.parent / "data" / "synthetic"

start = time.monotonic()
config = harness.load_config(DATA / "config.json")
harness.cmd_sweep(config)
harness.cmd_oracle(config)
harness.cmd_targets(config)
harness.cmd_features(config)

predictions = [harness.cmd_truncate(config, "fixed_k", k=k) for k in (10, 20, 100)]
predictions += [harness.cmd_truncate(config, "greedy_k", beta=b) for b in (0.0, 1.0, 2.0)]
predictions.append(harness.cmd_truncate(config, "surprise"))
predictions.append(DATA / "predictions" / "demo_trained.tsv")

csv_path, txt_path = harness.cmd_evaluate(config, predictions)
harness.cmd_plotdata(config, predictions, svg=True)
elapsed = time.monotonic() - start

print()
print(txt_path.read_text())
print(f"pipeline finished in {elapsed:.1f}s; reports in {csv_path.parent}")
