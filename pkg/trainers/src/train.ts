/** The training loop: seeded init, seeded epoch shuffles, Adam, and
 * prediction-file output.  Identical config + seed gives identical
 * prediction files (single-threaded wasm backend, fixed data order).
 */

import * as tf from "@tensorflow/tfjs";
import * as fs from "node:fs";
import * as path from "node:path";

import { initBackend } from "./backend.js";
import type { TrainConfig } from "./config.js";
import { methodLabel } from "./config.js";
import {
  buildDataset,
  disposeBatch,
  disposeDataset,
  gatherBatch,
  type Batch,
  type Dataset,
} from "./data.js";
import { readFeatureFile, readTargetFile, overrideTargets, writeJson, writePredictions } from "./io.js";
import {
  bicutLoss,
  crossEntropyTargetLoss,
  expectedTargetLoss,
  marginPairLoss,
  relevanceBce,
} from "./losses.js";
import {
  bicutPredict,
  buildModel,
  distributionPredict,
  type TruncationModel,
} from "./models.js";
import { maskedSoftmax } from "./attention.js";
import { mulberry32, shuffleInPlace, type Rng } from "./prng.js";

export interface TrainOutcome {
  methodName: string;
  cutoffs: Map<string, number>;
  epochLosses: number[];
  skippedLists: number;
  backend: string;
}

const MTCUT_RELEVANCE_WEIGHT = 0.5;
const MTCUT_MARGIN_WEIGHT = 0.5;
const MTCUT_PAIRS_PER_LIST = 16;

function samplePairs(
  labels: Float32Array,
  mask: Float32Array,
  batchSize: number,
  depth: number,
  rng: Rng,
) {
  const listIdx: number[] = [];
  const relIdx: number[] = [];
  const irrIdx: number[] = [];
  for (let b = 0; b < batchSize; b++) {
    const rel: number[] = [];
    const irr: number[] = [];
    for (let i = 0; i < depth; i++) {
      if (mask[b * depth + i] < 0.5) continue;
      (labels[b * depth + i] > 0.5 ? rel : irr).push(i);
    }
    if (rel.length === 0 || irr.length === 0) continue;
    for (let s = 0; s < MTCUT_PAIRS_PER_LIST; s++) {
      listIdx.push(b);
      relIdx.push(rel[Math.floor(rng() * rel.length)]);
      irrIdx.push(irr[Math.floor(rng() * irr.length)]);
    }
  }
  return { listIdx, relIdx, irrIdx };
}

function batchLoss(
  model: TruncationModel,
  batch: Batch,
  fullDepth: boolean,
  config: TrainConfig,
  pairRng: Rng,
  skipCounter: { skipped: number },
): tf.Scalar {
  const attentionMask = fullDepth ? null : batch.mask;
  const inputs = { features: batch.features, mask: attentionMask, embeddings: batch.embeddings };
  if (model.method === "bicut") {
    const probabilities = model.forward(inputs);
    const { loss, skipped } = bicutLoss(probabilities, batch.labels, batch.mask, config.eta);
    skipCounter.skipped += skipped;
    return loss;
  }
  const logits = model.forward(inputs);
  const dist = maskedSoftmax(logits, attentionMask);
  const truncation =
    config.loss === "cross_entropy"
      ? crossEntropyTargetLoss(dist, batch.positionTargets)
      : expectedTargetLoss(dist, batch.positionTargets);
  if (model.method !== "mtcut") return truncation;

  const relevance = model.relevanceHead!(inputs);
  const bce = relevanceBce(relevance, batch.labels, batch.mask);
  const pairs = samplePairs(
    batch.labels.dataSync() as Float32Array,
    batch.mask.dataSync() as Float32Array,
    batch.labels.shape[0],
    batch.labels.shape[1],
    pairRng,
  );
  const margin = marginPairLoss(relevance, pairs);
  return truncation
    .add(bce.mul(MTCUT_RELEVANCE_WEIGHT))
    .add(margin.mul(MTCUT_MARGIN_WEIGHT)) as tf.Scalar;
}

export function predictDataset(model: TruncationModel, dataset: Dataset): Map<string, number> {
  const cutoffs = new Map<string, number>();
  const outputs = tf.tidy(() =>
    model.forward({
      features: dataset.features,
      mask: dataset.fullDepth ? null : dataset.mask,
      embeddings: dataset.embeddings,
    }),
  );
  const values = outputs.arraySync() as number[][];
  outputs.dispose();
  dataset.queryIds.forEach((qid, row) => {
    const realLength = dataset.realLengths[row];
    const k =
      model.method === "bicut"
        ? bicutPredict(values[row], realLength)
        : distributionPredict(values[row], realLength);
    cutoffs.set(qid, k);
  });
  return cutoffs;
}

export async function trainFromConfig(config: TrainConfig): Promise<TrainOutcome> {
  const backend = await initBackend();

  const trainQueries = readFeatureFile(config.featuresTrain);
  if (config.targetsTrain) {
    overrideTargets(trainQueries, readTargetFile(config.targetsTrain));
  }
  const evalQueries = readFeatureFile(config.featuresEval);
  const needEmbeddings = config.method === "lecut";
  const trainSet = buildDataset(trainQueries, config.listDepth, { needEmbeddings });
  const evalSet = buildDataset(evalQueries, config.listDepth, { needEmbeddings });
  if (trainSet.featureDim !== evalSet.featureDim) {
    throw new Error("train and eval feature files disagree on the feature set");
  }

  const model = buildModel(config.method, trainSet.featureDim, trainSet.embeddingDim, config.seed);
  const optimizer = tf.train.adam(config.learningRate);
  const shuffleRng = mulberry32(config.seed ^ 0x5eed);
  const pairRng = mulberry32(config.seed ^ 0x9a1);
  const skipCounter = { skipped: 0 };

  const n = trainSet.queryIds.length;
  const order = Array.from({ length: n }, (_, i) => i);
  const epochLosses: number[] = [];
  for (let epoch = 0; epoch < config.epochs; epoch++) {
    shuffleInPlace(order, shuffleRng);
    let epochLoss = 0;
    let batches = 0;
    for (let start = 0; start < n; start += config.batchSize) {
      const indices = order.slice(start, start + config.batchSize);
      const batch = gatherBatch(trainSet, indices);
      const cost = optimizer.minimize(
        () => batchLoss(model, batch, trainSet.fullDepth, config, pairRng, skipCounter),
        true,
        model.variables,
      )!;
      const value = (cost.dataSync() as Float32Array)[0];
      cost.dispose();
      disposeBatch(batch);
      if (!Number.isFinite(value)) {
        throw new Error(
          `non-finite loss at epoch ${epoch + 1}, batch ${batches + 1} ` +
            `(method ${config.method}, lr ${config.learningRate})`,
        );
      }
      epochLoss += value;
      batches += 1;
    }
    epochLosses.push(epochLoss / batches);
  }

  const cutoffs = predictDataset(model, evalSet);
  const name = methodLabel(config);
  writePredictions(config.predictionsOut, name, cutoffs);
  writeJson(config.logOut, {
    method: config.method,
    method_name: name,
    backend,
    seed: config.seed,
    epochs: config.epochs,
    batch_size: config.batchSize,
    learning_rate: config.learningRate,
    loss: config.loss,
    beta_tag: config.betaTag,
    eta: config.method === "bicut" ? config.eta : undefined,
    skipped_degenerate_lists: skipCounter.skipped,
    epoch_losses: epochLosses,
  });
  if (config.checkpointOut) saveCheckpoint(config.checkpointOut, model, config);

  const outcome: TrainOutcome = {
    methodName: name,
    cutoffs,
    epochLosses,
    skippedLists: skipCounter.skipped,
    backend,
  };
  disposeDataset(trainSet);
  disposeDataset(evalSet);
  model.dispose();
  optimizer.dispose();
  return outcome;
}

export function saveCheckpoint(
  filePath: string,
  model: TruncationModel,
  config: TrainConfig,
): void {
  const weights = model.variables.map((variable) => ({
    shape: variable.shape,
    data: Buffer.from(new Float32Array(variable.dataSync() as Float32Array).buffer).toString(
      "base64",
    ),
  }));
  fs.mkdirSync(path.dirname(filePath), { recursive: true });
  fs.writeFileSync(
    filePath,
    JSON.stringify({
      method: config.method,
      seed: config.seed,
      list_depth: config.listDepth,
      weights,
    }),
    "utf-8",
  );
}

export function loadCheckpoint(filePath: string, model: TruncationModel): void {
  const raw = JSON.parse(fs.readFileSync(filePath, "utf-8"));
  if (raw.method !== model.method) {
    throw new Error(`checkpoint is for ${raw.method}, not ${model.method}`);
  }
  if (raw.weights.length !== model.variables.length) {
    throw new Error("checkpoint variable count mismatch");
  }
  raw.weights.forEach((weight: { shape: number[]; data: string }, index: number) => {
    const buffer = Buffer.from(weight.data, "base64");
    const values = new Float32Array(buffer.buffer, buffer.byteOffset, buffer.byteLength / 4);
    const tensor = tf.tensor(Array.from(values), weight.shape);
    model.variables[index].assign(tensor);
    tensor.dispose();
  });
}

export async function predictFromConfig(config: TrainConfig): Promise<TrainOutcome> {
  const backend = await initBackend();
  if (!config.checkpointOut) {
    throw new Error("predict needs checkpoint_out pointing at a trained checkpoint");
  }
  const evalQueries = readFeatureFile(config.featuresEval);
  const needEmbeddings = config.method === "lecut";
  const evalSet = buildDataset(evalQueries, config.listDepth, { needEmbeddings });
  const model = buildModel(config.method, evalSet.featureDim, evalSet.embeddingDim, config.seed);
  loadCheckpoint(config.checkpointOut, model);
  const cutoffs = predictDataset(model, evalSet);
  const name = methodLabel(config);
  writePredictions(config.predictionsOut, name, cutoffs);
  disposeDataset(evalSet);
  model.dispose();
  return { methodName: name, cutoffs, epochLosses: [], skippedLists: 0, backend };
}
