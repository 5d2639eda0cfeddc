/** The five truncation architectures.
 *
 * All consume [B, L, F] item features (LeCut additionally a [B, L, 2E]
 * query+item embedding block) and emit per-position outputs:
 *
 * - bicut: "continue" probabilities in [0, 1] (sequential labeling)
 * - choppy / attncut / mtcut / lecut: logits whose masked softmax is a
 *   distribution over candidate cut-off positions (position i = cut k=i+1)
 *
 * Sizes follow the original configurations: BiCut 2 BiLSTM layers of 128;
 * Choppy 3 transformer layers with 8 heads at 128; AttnCut (and the MtCut
 * and LeCut variants built on it) 2 BiLSTM layers of 128 into a 4-head
 * transformer layer at 128.  MtCut adds a 3-expert mixture with per-task
 * softmax gates feeding the truncation head and an auxiliary per-position
 * relevance head.  LeCut projects the embedding block to 128 dims with a
 * learned linear map and appends it to the shared features.
 */

import * as tf from "@tensorflow/tfjs";

import {
  dense,
  denseVarList,
  makeDense,
  makeTransformerBlock,
  sinusoidalPositions,
  transformerBlock,
  transformerBlockVarList,
  type DenseVars,
  type TransformerBlockVars,
} from "./attention.js";
import { biLstm, biLstmVarList, makeBiLstmVars, type BiLstmVars } from "./lstm.js";
import { mulberry32, type Rng } from "./prng.js";

export const HIDDEN = 128;
export const MTCUT_EXPERTS = 3;
export const MTCUT_EXPERT_DIM = 64;

export type MethodName = "bicut" | "choppy" | "attncut" | "mtcut" | "lecut";

export interface ModelInputs {
  features: tf.Tensor3D;
  /** null when every list is full depth (no padding anywhere) */
  mask: tf.Tensor2D | null;
  embeddings?: tf.Tensor3D | null;
}

export interface TruncationModel {
  method: MethodName;
  variables: tf.Variable[];
  /** bicut: continue probabilities; others: cut-off position logits. */
  forward(inputs: ModelInputs): tf.Tensor2D;
  /** mtcut only: auxiliary per-position relevance scores. */
  relevanceHead?(inputs: ModelInputs): tf.Tensor2D;
  dispose(): void;
}

function disposeAll(variables: tf.Variable[]): void {
  for (const v of variables) v.dispose();
}

export function makeBicut(featureDim: number, seed: number): TruncationModel {
  const rng = mulberry32(seed);
  const layer1 = makeBiLstmVars(rng, featureDim, HIDDEN);
  const layer2 = makeBiLstmVars(rng, 2 * HIDDEN, HIDDEN);
  const head = makeDense(rng, 2 * HIDDEN, 1);
  const variables = [...biLstmVarList(layer1), ...biLstmVarList(layer2), ...denseVarList(head)];
  return {
    method: "bicut",
    variables,
    forward({ features }) {
      const h1 = biLstm(features, layer1);
      const h2 = biLstm(h1, layer2);
      return dense(h2, head).squeeze([-1]).sigmoid() as tf.Tensor2D;
    },
    dispose: () => disposeAll(variables),
  };
}

interface TransformerStack {
  proj: DenseVars;
  blocks: TransformerBlockVars[];
  positions: tf.Tensor2D | null;
}

function makeStack(rng: Rng, inputDim: number, layers: number, heads: number): TransformerStack {
  return {
    proj: makeDense(rng, inputDim, HIDDEN),
    blocks: Array.from({ length: layers }, () => makeTransformerBlock(rng, HIDDEN, heads)),
    positions: null,
  };
}

function runStack(stack: TransformerStack, x: tf.Tensor3D, mask: tf.Tensor2D | null): tf.Tensor3D {
  const [, L] = x.shape;
  if (!stack.positions || stack.positions.shape[0] !== L) {
    stack.positions?.dispose();
    stack.positions = tf.keep(sinusoidalPositions(L, HIDDEN));
  }
  let h = dense(x, stack.proj).add(stack.positions) as tf.Tensor3D;
  for (const block of stack.blocks) h = transformerBlock(h, block, mask);
  return h;
}

function stackVarList(stack: TransformerStack): tf.Variable[] {
  return [...denseVarList(stack.proj), ...stack.blocks.flatMap(transformerBlockVarList)];
}

export function makeChoppy(featureDim: number, seed: number): TruncationModel {
  const rng = mulberry32(seed);
  const stack = makeStack(rng, featureDim, 3, 8);
  const head = makeDense(rng, HIDDEN, 1);
  const variables = [...stackVarList(stack), ...denseVarList(head)];
  return {
    method: "choppy",
    variables,
    forward({ features, mask }) {
      const h = runStack(stack, features, mask);
      return dense(h, head).squeeze([-1]) as tf.Tensor2D;
    },
    dispose: () => {
      disposeAll(variables);
      stack.positions?.dispose();
    },
  };
}

interface RecurrentAttentionTrunk {
  layer1: BiLstmVars;
  layer2: BiLstmVars;
  stack: TransformerStack;
}

function makeTrunk(rng: Rng, featureDim: number): RecurrentAttentionTrunk {
  return {
    layer1: makeBiLstmVars(rng, featureDim, HIDDEN),
    layer2: makeBiLstmVars(rng, 2 * HIDDEN, HIDDEN),
    stack: makeStack(rng, 2 * HIDDEN, 1, 4),
  };
}

function runTrunk(
  trunk: RecurrentAttentionTrunk,
  x: tf.Tensor3D,
  mask: tf.Tensor2D | null,
): tf.Tensor3D {
  const h1 = biLstm(x, trunk.layer1);
  const h2 = biLstm(h1, trunk.layer2);
  return runStack(trunk.stack, h2, mask);
}

function trunkVarList(trunk: RecurrentAttentionTrunk): tf.Variable[] {
  return [
    ...biLstmVarList(trunk.layer1),
    ...biLstmVarList(trunk.layer2),
    ...stackVarList(trunk.stack),
  ];
}

export function makeAttnCut(featureDim: number, seed: number): TruncationModel {
  const rng = mulberry32(seed);
  const trunk = makeTrunk(rng, featureDim);
  const head = makeDense(rng, HIDDEN, 1);
  const variables = [...trunkVarList(trunk), ...denseVarList(head)];
  return {
    method: "attncut",
    variables,
    forward({ features, mask }) {
      const h = runTrunk(trunk, features, mask);
      return dense(h, head).squeeze([-1]) as tf.Tensor2D;
    },
    dispose: () => {
      disposeAll(variables);
      trunk.stack.positions?.dispose();
    },
  };
}

export function makeMtCut(featureDim: number, seed: number): TruncationModel {
  const rng = mulberry32(seed);
  const trunk = makeTrunk(rng, featureDim);
  const experts = Array.from({ length: MTCUT_EXPERTS }, () =>
    makeDense(rng, HIDDEN, MTCUT_EXPERT_DIM),
  );
  const gateTruncation = makeDense(rng, HIDDEN, MTCUT_EXPERTS);
  const gateRelevance = makeDense(rng, HIDDEN, MTCUT_EXPERTS);
  const headTruncation = makeDense(rng, MTCUT_EXPERT_DIM, 1);
  const headRelevance = makeDense(rng, MTCUT_EXPERT_DIM, 1);
  const variables = [
    ...trunkVarList(trunk),
    ...experts.flatMap(denseVarList),
    ...denseVarList(gateTruncation),
    ...denseVarList(gateRelevance),
    ...denseVarList(headTruncation),
    ...denseVarList(headRelevance),
  ];

  const mixture = (h: tf.Tensor3D, gate: DenseVars): tf.Tensor3D => {
    const expertOut = tf.stack(
      experts.map((e) => dense(h, e).relu()),
      -2,
    ); // [B, L, experts, expertDim]
    const weights = dense(h, gate).softmax().expandDims(-1); // [B, L, experts, 1]
    return expertOut.mul(weights).sum(-2) as tf.Tensor3D; // [B, L, expertDim]
  };

  let cachedTrunkOut: { key: tf.Tensor3D; value: tf.Tensor3D } | null = null;
  const trunkOut = (inputs: ModelInputs): tf.Tensor3D => {
    // forward() and relevanceHead() are always called on the same batch
    // inside one tidy scope; reuse the shared trunk activation
    if (cachedTrunkOut && cachedTrunkOut.key === inputs.features && !cachedTrunkOut.value.isDisposed) {
      return cachedTrunkOut.value;
    }
    const value = runTrunk(trunk, inputs.features, inputs.mask);
    cachedTrunkOut = { key: inputs.features, value };
    return value;
  };

  return {
    method: "mtcut",
    variables,
    forward(inputs) {
      const h = trunkOut(inputs);
      return dense(mixture(h, gateTruncation), headTruncation).squeeze([-1]) as tf.Tensor2D;
    },
    relevanceHead(inputs) {
      const h = trunkOut(inputs);
      return dense(mixture(h, gateRelevance), headRelevance)
        .squeeze([-1])
        .sigmoid() as tf.Tensor2D;
    },
    dispose: () => {
      disposeAll(variables);
      trunk.stack.positions?.dispose();
    },
  };
}

export function makeLeCut(featureDim: number, embeddingDim: number, seed: number): TruncationModel {
  if (embeddingDim <= 0) {
    throw new Error("lecut requires dense_embedding features");
  }
  const rng = mulberry32(seed);
  const embProj = makeDense(rng, embeddingDim, HIDDEN);
  const trunk = makeTrunk(rng, featureDim + HIDDEN);
  const head = makeDense(rng, HIDDEN, 1);
  const variables = [...denseVarList(embProj), ...trunkVarList(trunk), ...denseVarList(head)];
  return {
    method: "lecut",
    variables,
    forward({ features, mask, embeddings }) {
      if (!embeddings) throw new Error("lecut forward needs embeddings");
      const projected = dense(embeddings, embProj);
      const combined = tf.concat([features, projected], -1) as tf.Tensor3D;
      const h = runTrunk(trunk, combined, mask);
      return dense(h, head).squeeze([-1]) as tf.Tensor2D;
    },
    dispose: () => {
      disposeAll(variables);
      trunk.stack.positions?.dispose();
    },
  };
}

export function buildModel(
  method: MethodName,
  featureDim: number,
  embeddingDim: number,
  seed: number,
): TruncationModel {
  switch (method) {
    case "bicut":
      return makeBicut(featureDim, seed);
    case "choppy":
      return makeChoppy(featureDim, seed);
    case "attncut":
      return makeAttnCut(featureDim, seed);
    case "mtcut":
      return makeMtCut(featureDim, seed);
    case "lecut":
      return makeLeCut(featureDim, embeddingDim, seed);
  }
}

/** First position with continue-probability below 0.5 (never 0). */
export function bicutPredict(probabilities: number[], realLength: number): number {
  for (let i = 0; i < realLength; i++) {
    if (probabilities[i] < 0.5) return Math.max(i, 1);
  }
  return realLength;
}

/** Argmax of the masked cut-off distribution, mapped to k = index + 1. */
export function distributionPredict(logits: number[], realLength: number): number {
  let best = 0;
  for (let i = 1; i < realLength; i++) {
    if (logits[i] > logits[best]) best = i;
  }
  return best + 1;
}
