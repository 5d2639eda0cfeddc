/** Dataset assembly: feature JSONL -> dense tensors with padding masks.
 *
 * Base per-item features, in order: retrieval_score, log1p(length)/5,
 * log1p(unique)/5, tfidf_sim_prev, tfidf_sim_next, and, when present in
 * the file, embed_sim_prev and embed_sim_next.  Token counts are squashed
 * so no single feature dominates the others' [0, 1]-ish range.
 *
 * Targets are aligned to positions: position i (0-based) corresponds to
 * cut-off k = i+1, so the distribution support never includes k = 0.
 * Lists shorter than the configured depth are zero-padded and masked;
 * longer ones are an error (the exporter already caps depth).
 */

import * as tf from "@tensorflow/tfjs";

import type { QueryFeatures } from "./io.js";

export interface Dataset {
  queryIds: string[];
  /** [N, L, F] base features */
  features: tf.Tensor3D;
  /** [N, L] 1.0 on real positions */
  mask: tf.Tensor2D;
  /** [N, L] binary relevance labels */
  labels: tf.Tensor2D;
  /** [N, L] target value of cut-off i+1 */
  positionTargets: tf.Tensor2D;
  /** [N, L, 2*embDim] query+item embeddings, when available */
  embeddings: tf.Tensor3D | null;
  realLengths: number[];
  /** true when every list fills the configured depth (no padding at all) */
  fullDepth: boolean;
  featureDim: number;
  embeddingDim: number;
}

export function hasEmbedSims(queries: QueryFeatures[]): boolean {
  return queries.every((q) => q.records.every((r) => r.embed_sim_prev !== undefined));
}

export function hasDenseEmbeddings(queries: QueryFeatures[]): boolean {
  return queries.every((q) => q.records.every((r) => r.dense_embedding !== undefined));
}

export function buildDataset(
  queries: QueryFeatures[],
  listDepth: number,
  options: { needEmbeddings?: boolean } = {},
): Dataset {
  const sorted = [...queries].sort((a, b) => (a.queryId < b.queryId ? -1 : 1));
  const n = sorted.length;
  const withEmbedSims = hasEmbedSims(sorted);
  const baseDim = withEmbedSims ? 7 : 5;

  let embeddingDim = 0;
  if (options.needEmbeddings) {
    if (!hasDenseEmbeddings(sorted)) {
      throw new Error("dense_embedding fields are required but missing from the feature file");
    }
    embeddingDim = sorted[0].records[0].dense_embedding!.length;
  }

  const features = new Float32Array(n * listDepth * baseDim);
  const mask = new Float32Array(n * listDepth);
  const labels = new Float32Array(n * listDepth);
  const positionTargets = new Float32Array(n * listDepth);
  const embeddings = embeddingDim > 0 ? new Float32Array(n * listDepth * embeddingDim) : null;
  const realLengths: number[] = [];

  sorted.forEach((query, qi) => {
    const depth = query.records.length;
    if (depth > listDepth) {
      throw new Error(
        `query ${query.queryId} has depth ${depth} > configured list_depth ${listDepth}`,
      );
    }
    realLengths.push(depth);
    query.records.forEach((record, i) => {
      const base = (qi * listDepth + i) * baseDim;
      features[base] = record.retrieval_score;
      features[base + 1] = Math.log1p(record.length_tokens) / 5;
      features[base + 2] = Math.log1p(record.unique_tokens) / 5;
      features[base + 3] = record.tfidf_sim_prev;
      features[base + 4] = record.tfidf_sim_next;
      if (withEmbedSims) {
        features[base + 5] = record.embed_sim_prev!;
        features[base + 6] = record.embed_sim_next!;
      }
      mask[qi * listDepth + i] = 1;
      labels[qi * listDepth + i] = query.labels[i];
      positionTargets[qi * listDepth + i] = query.targets[i + 1];
      if (embeddings) {
        const emb = record.dense_embedding!;
        if (emb.length !== embeddingDim) {
          throw new Error(`inconsistent dense_embedding length for ${query.queryId}`);
        }
        embeddings.set(emb, (qi * listDepth + i) * embeddingDim);
      }
    });
  });

  return {
    queryIds: sorted.map((q) => q.queryId),
    features: tf.tensor3d(features, [n, listDepth, baseDim]),
    mask: tf.tensor2d(mask, [n, listDepth]),
    labels: tf.tensor2d(labels, [n, listDepth]),
    positionTargets: tf.tensor2d(positionTargets, [n, listDepth]),
    embeddings: embeddings ? tf.tensor3d(embeddings, [n, listDepth, embeddingDim]) : null,
    realLengths,
    fullDepth: realLengths.every((len) => len === listDepth),
    featureDim: baseDim,
    embeddingDim,
  };
}

export function disposeDataset(dataset: Dataset): void {
  dataset.features.dispose();
  dataset.mask.dispose();
  dataset.labels.dispose();
  dataset.positionTargets.dispose();
  dataset.embeddings?.dispose();
}

/** Row-subset of the dataset tensors for one minibatch. */
export function gatherBatch(dataset: Dataset, indices: number[]) {
  const idx = tf.tensor1d(indices, "int32");
  const batch = {
    features: tf.gather(dataset.features, idx) as tf.Tensor3D,
    mask: tf.gather(dataset.mask, idx) as tf.Tensor2D,
    labels: tf.gather(dataset.labels, idx) as tf.Tensor2D,
    positionTargets: tf.gather(dataset.positionTargets, idx) as tf.Tensor2D,
    embeddings: dataset.embeddings
      ? (tf.gather(dataset.embeddings, idx) as tf.Tensor3D)
      : null,
  };
  idx.dispose();
  return batch;
}

export type Batch = ReturnType<typeof gatherBatch>;

export function disposeBatch(batch: Batch): void {
  batch.features.dispose();
  batch.mask.dispose();
  batch.labels.dispose();
  batch.positionTargets.dispose();
  batch.embeddings?.dispose();
}
