/** Training objectives.
 *
 * BiCut's sequential-labeling loss, per list with relevant fraction r:
 *
 *   L = sum_i [ eta * 1(y_i=0) * p_i / (1-r) + (1-eta) * (1-p_i) / r * 1(y_i=1) ]
 *
 * Lists with r = 0 or r = 1 are degenerate (the loss divides by r and
 * 1-r) and are skipped with a counter.
 *
 * Distribution methods train on the target vector over cut-offs, either
 * as negative expected target (default) or as cross-entropy against the
 * sum-normalized targets.
 */

import * as tf from "@tensorflow/tfjs";

/** Reference bicut loss on plain arrays (float64); also used by tests. */
export function bicutLossRef(p: number[], y: number[], eta: number): number {
  const n = p.length;
  let relevant = 0;
  for (const label of y) relevant += label;
  const r = relevant / n;
  if (r === 0 || r === 1) throw new Error("degenerate list: r is 0 or 1");
  let total = 0;
  for (let i = 0; i < n; i++) {
    if (y[i] === 1) total += ((1 - eta) * (1 - p[i])) / r;
    else total += (eta * p[i]) / (1 - r);
  }
  return total;
}

/** Analytic gradient of bicutLossRef w.r.t. p (the loss is linear in p). */
export function bicutLossGradRef(p: number[], y: number[], eta: number): number[] {
  const n = p.length;
  let relevant = 0;
  for (const label of y) relevant += label;
  const r = relevant / n;
  if (r === 0 || r === 1) throw new Error("degenerate list: r is 0 or 1");
  return y.map((label) => (label === 1 ? -(1 - eta) / r : eta / (1 - r)));
}

export interface BicutBatchLoss {
  loss: tf.Scalar;
  skipped: number;
}

/** Mean bicut loss over the non-degenerate lists of a batch. */
export function bicutLoss(
  p: tf.Tensor2D,
  y: tf.Tensor2D,
  mask: tf.Tensor2D,
  eta: number,
): BicutBatchLoss {
  const lengths = mask.sum(-1); // [B]
  const relevant = y.mul(mask).sum(-1);
  const r = relevant.div(lengths);
  const valid = r.greater(0).logicalAnd(r.less(1)).cast("float32"); // [B]
  const skipped = p.shape[0] - (valid.sum().dataSync() as Float32Array)[0];

  const rSafe = r.clipByValue(1e-6, 1 - 1e-6);
  const continueTerm = y
    .sub(1)
    .neg()
    .mul(p)
    .mul(eta)
    .div(rSafe.sub(1).neg().expandDims(-1)); // eta * 1(y=0) * p / (1-r)
  const truncateTerm = y
    .mul(tf.scalar(1).sub(p))
    .mul(1 - eta)
    .div(rSafe.expandDims(-1)); // (1-eta) * (1-p) / r * 1(y=1)
  const perList = continueTerm.add(truncateTerm).mul(mask).sum(-1); // [B]
  const validCount = valid.sum().maximum(1);
  const loss = perList.mul(valid).sum().div(validCount) as tf.Scalar;
  return { loss, skipped };
}

/** Negative expected target under the predicted cut-off distribution. */
export function expectedTargetLoss(dist: tf.Tensor2D, targets: tf.Tensor2D): tf.Scalar {
  if (dist.shape[1] !== targets.shape[1]) {
    throw new Error(
      `length mismatch: distribution ${dist.shape[1]} vs targets ${targets.shape[1]}`,
    );
  }
  return dist.mul(targets).sum(-1).neg().mean() as tf.Scalar;
}

/** Reference version on plain arrays. */
export function expectedTargetLossRef(dist: number[], targets: number[]): number {
  if (dist.length !== targets.length) throw new Error("length mismatch");
  let total = 0;
  for (let i = 0; i < dist.length; i++) total -= dist[i] * targets[i];
  return total;
}

/** Cross-entropy against sum-normalized targets (all-zero rows are skipped). */
export function crossEntropyTargetLoss(dist: tf.Tensor2D, targets: tf.Tensor2D): tf.Scalar {
  const sums = targets.sum(-1, true);
  const valid = sums.squeeze([-1]).greater(0).cast("float32"); // [B]
  const normalized = targets.div(sums.maximum(1e-12));
  const perList = normalized.mul(dist.add(1e-9).log()).sum(-1).neg(); // [B]
  return perList.mul(valid).sum().div(valid.sum().maximum(1)) as tf.Scalar;
}

/** Per-position binary cross-entropy, masked. */
export function relevanceBce(scores: tf.Tensor2D, y: tf.Tensor2D, mask: tf.Tensor2D): tf.Scalar {
  const s = scores.clipByValue(1e-6, 1 - 1e-6);
  const ll = y.mul(s.log()).add(y.sub(1).neg().mul(tf.scalar(1).sub(s).log()));
  return ll.neg().mul(mask).sum().div(mask.sum().maximum(1)) as tf.Scalar;
}

/** Gather with a hand-written scatter gradient: the wasm backend lacks
 * the UnsortedSegmentSum kernel that tf.gather's gradient needs. */
function gatherPositions(flat: tf.Tensor1D, positions: number[]): tf.Tensor1D {
  const idx = tf.tensor1d(positions, "int32");
  const op = tf.customGrad((...args: unknown[]) => {
    const source = args[0] as tf.Tensor1D;
    const save = args[1] as tf.GradSaveFunc;
    save([]);
    const value = tf.gather(source, idx);
    const n = source.shape[0];
    const gradFunc = (dy: tf.Tensor) => {
      const grads = new Float32Array(n);
      const dyValues = dy.dataSync() as Float32Array;
      for (let j = 0; j < positions.length; j++) grads[positions[j]] += dyValues[j];
      return [tf.tensor1d(grads)];
    };
    return { value, gradFunc };
  });
  return op(flat) as tf.Tensor1D;
}

/** Hinge on sampled (relevant, irrelevant) position pairs per list. */
export function marginPairLoss(
  scores: tf.Tensor2D,
  pairs: { listIdx: number[]; relIdx: number[]; irrIdx: number[] },
  margin = 1.0,
): tf.Scalar {
  if (pairs.listIdx.length === 0) return tf.scalar(0);
  const flat = scores.reshape([-1]) as tf.Tensor1D;
  const L = scores.shape[1];
  const relPos = pairs.listIdx.map((b, j) => b * L + pairs.relIdx[j]);
  const irrPos = pairs.listIdx.map((b, j) => b * L + pairs.irrIdx[j]);
  const rel = gatherPositions(flat, relPos);
  const irr = gatherPositions(flat, irrPos);
  return rel.sub(irr).sub(margin).neg().relu().mean() as tf.Scalar;
}
