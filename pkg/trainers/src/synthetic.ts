/** Synthetic learnability fixtures, written in the feature-JSONL schema.
 *
 * Step task: each list has a boundary m drawn uniformly; the
 * retrieval_score feature is ~1 up to the boundary and ~0 after it, so
 * the target peak position is a deterministic function of that one
 * feature.  Labels mark the same prefix as relevant (the sequential
 * labeling task), and the target vector over cut-offs 0..depth has a
 * triangular peak at k = m (the distribution task).  Every other feature
 * is seeded noise.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { mulberry32, type Rng } from "./prng.js";

export interface StepTaskOptions {
  count: number;
  depth: number;
  seed: number;
  minBoundary?: number;
  maxBoundary?: number;
  embeddingDim?: number;
}

function round6(x: number): number {
  return Math.round(x * 1e6) / 1e6;
}

export function stepTaskQueries(options: StepTaskOptions) {
  const { count, depth, seed } = options;
  const minB = options.minBoundary ?? 5;
  const maxB = options.maxBoundary ?? depth - 5;
  const embeddingDim = options.embeddingDim ?? 4;
  const rng: Rng = mulberry32(seed);

  const queries = [];
  for (let q = 0; q < count; q++) {
    const boundary = minB + Math.floor(rng() * (maxB - minB + 1));
    const queryEmbedding = Array.from({ length: embeddingDim }, () => round6(rng() - 0.5));
    const records = [];
    const labels = [];
    for (let i = 0; i < depth; i++) {
      const inPrefix = i < boundary;
      const score = inPrefix ? 1 - 0.05 * rng() : 0.05 * rng();
      records.push({
        doc_id: `d${q}_${i}`,
        retrieval_score: round6(score),
        length_tokens: 5 + Math.floor(rng() * 40),
        unique_tokens: 3 + Math.floor(rng() * 20),
        tfidf_sim_prev: round6(rng()),
        tfidf_sim_next: round6(rng()),
        embed_sim_prev: round6(rng()),
        embed_sim_next: round6(rng()),
        dense_embedding: [
          ...queryEmbedding,
          round6(score),
          ...Array.from({ length: embeddingDim - 1 }, () => round6(rng() - 0.5)),
        ],
      });
      labels.push(inPrefix ? 1 : 0);
    }
    const targets = [];
    for (let k = 0; k <= depth; k++) {
      targets.push(round6(Math.max(0, 1 - 0.45 * Math.abs(k - boundary))));
    }
    queries.push({
      schema_version: "v1",
      query_id: `sq${String(q).padStart(4, "0")}`,
      records,
      labels,
      targets,
      boundary,
    });
  }
  return queries;
}

export function writeStepTask(filePath: string, options: StepTaskOptions): Map<string, number> {
  const queries = stepTaskQueries(options);
  const boundaries = new Map<string, number>();
  const lines = queries.map((query) => {
    boundaries.set(query.query_id, query.boundary);
    const { boundary, ...obj } = query;
    return JSON.stringify(obj);
  });
  fs.mkdirSync(path.dirname(filePath), { recursive: true });
  fs.writeFileSync(filePath, lines.join("\n") + "\n", "utf-8");
  return boundaries;
}
