/** Transformer encoder pieces: sinusoidal positions, multi-head
 * self-attention, layer norm, and the residual block that combines them.
 * Assembled from big fused ops so autograd through them stays cheap.
 */

import * as tf from "@tensorflow/tfjs";

import { glorot, type Rng } from "./prng.js";

export function sinusoidalPositions(length: number, dim: number): tf.Tensor2D {
  const data = new Float32Array(length * dim);
  for (let pos = 0; pos < length; pos++) {
    for (let i = 0; i < dim; i++) {
      const angle = pos / Math.pow(10000, (2 * Math.floor(i / 2)) / dim);
      data[pos * dim + i] = i % 2 === 0 ? Math.sin(angle) : Math.cos(angle);
    }
  }
  return tf.tensor2d(data, [length, dim]);
}

export interface DenseVars {
  W: tf.Variable;
  b: tf.Variable;
}

export function makeDense(rng: Rng, inputDim: number, units: number): DenseVars {
  return {
    W: tf.variable(tf.tensor2d(glorot(rng, inputDim, units), [inputDim, units])),
    b: tf.variable(tf.zeros([units])),
  };
}

export function dense(x: tf.Tensor, vars: DenseVars): tf.Tensor {
  const dims = x.shape;
  const inputDim = dims[dims.length - 1] as number;
  const flat = x.reshape([-1, inputDim]);
  const out = tf.matMul(flat as tf.Tensor2D, vars.W).add(vars.b);
  return out.reshape([...dims.slice(0, -1), vars.W.shape[1] as number]);
}

export function denseVarList(vars: DenseVars): tf.Variable[] {
  return [vars.W, vars.b];
}

export interface LayerNormVars {
  gamma: tf.Variable;
  beta: tf.Variable;
}

export function makeLayerNorm(dim: number): LayerNormVars {
  return { gamma: tf.variable(tf.ones([dim])), beta: tf.variable(tf.zeros([dim])) };
}

export function layerNorm(x: tf.Tensor, vars: LayerNormVars): tf.Tensor {
  const mean = x.mean(-1, true);
  const centered = x.sub(mean);
  const variance = centered.square().mean(-1, true);
  return centered.div(variance.add(1e-5).sqrt()).mul(vars.gamma).add(vars.beta);
}

export interface TransformerBlockVars {
  qkv: DenseVars;
  out: DenseVars;
  ff1: DenseVars;
  ff2: DenseVars;
  ln1: LayerNormVars;
  ln2: LayerNormVars;
  heads: number;
  dim: number;
}

export function makeTransformerBlock(rng: Rng, dim: number, heads: number): TransformerBlockVars {
  if (dim % heads !== 0) throw new Error(`model dim ${dim} not divisible by ${heads} heads`);
  return {
    qkv: makeDense(rng, dim, 3 * dim),
    out: makeDense(rng, dim, dim),
    ff1: makeDense(rng, dim, dim),
    ff2: makeDense(rng, dim, dim),
    ln1: makeLayerNorm(dim),
    ln2: makeLayerNorm(dim),
    heads,
    dim,
  };
}

export function transformerBlockVarList(vars: TransformerBlockVars): tf.Variable[] {
  return [
    ...denseVarList(vars.qkv),
    ...denseVarList(vars.out),
    ...denseVarList(vars.ff1),
    ...denseVarList(vars.ff2),
    vars.ln1.gamma,
    vars.ln1.beta,
    vars.ln2.gamma,
    vars.ln2.beta,
  ];
}

/** Self-attention + FFN with residuals.  A null mask means every
 * position is real (full-depth lists), skipping the masking ops. */
export function transformerBlock(
  h: tf.Tensor3D,
  vars: TransformerBlockVars,
  mask: tf.Tensor2D | null,
): tf.Tensor3D {
  const [B, L] = h.shape;
  const { heads, dim } = vars;
  const headDim = dim / heads;

  const qkv = dense(h, vars.qkv); // [B, L, 3*dim]
  const [q, k, v] = tf.split(qkv, 3, -1);
  const toHeads = (t: tf.Tensor) =>
    t.reshape([B, L, heads, headDim]).transpose([0, 2, 1, 3]); // [B, heads, L, headDim]
  // fold the 1/sqrt(headDim) scale into q: cheaper than scaling [B,h,L,L]
  const scores = tf.matMul(
    toHeads(q.mul(1 / Math.sqrt(headDim))) as tf.Tensor,
    toHeads(k) as tf.Tensor,
    false,
    true,
  ); // [B, heads, L, L]
  const masked = mask ? scores.add(mask.reshape([B, 1, 1, L]).sub(1).mul(1e9)) : scores;
  const attention = masked.softmax();
  const context = tf
    .matMul(attention as tf.Tensor, toHeads(v) as tf.Tensor)
    .transpose([0, 2, 1, 3])
    .reshape([B, L, dim]);
  const afterAttention = layerNorm(h.add(dense(context, vars.out)), vars.ln1) as tf.Tensor3D;
  const ff = dense(dense(afterAttention, vars.ff1).relu(), vars.ff2);
  return layerNorm(afterAttention.add(ff), vars.ln2) as tf.Tensor3D;
}

/** Softmax over real positions only; padded logits get -1e9. */
export function maskedSoftmax(logits: tf.Tensor2D, mask: tf.Tensor2D | null): tf.Tensor2D {
  if (!mask) return logits.softmax() as tf.Tensor2D;
  return logits.add(mask.sub(1).mul(1e9)).softmax() as tf.Tensor2D;
}
