/** Readers and writers for the experiment file formats.
 *
 * Inputs come from the Python lab: feature JSONL (one object per query
 * with records/labels/targets), and optionally a separate target file
 * ("# beta=... alpha=... metric=..." header, then "qid v0 v1 ...").
 * Outputs: prediction TSV ("# method=NAME", then "qid<TAB>k") and a JSON
 * training log.
 */

import * as fs from "node:fs";
import * as path from "node:path";

export interface FeatureRecord {
  doc_id: string;
  retrieval_score: number;
  length_tokens: number;
  unique_tokens: number;
  tfidf_sim_prev: number;
  tfidf_sim_next: number;
  embed_sim_prev?: number;
  embed_sim_next?: number;
  dense_embedding?: number[];
}

export interface QueryFeatures {
  queryId: string;
  records: FeatureRecord[];
  labels: number[];
  targets: number[];
}

export function readFeatureFile(filePath: string): QueryFeatures[] {
  const out: QueryFeatures[] = [];
  const text = fs.readFileSync(filePath, "utf-8");
  for (const [index, line] of text.split("\n").entries()) {
    const trimmed = line.trim();
    if (!trimmed) continue;
    const obj = JSON.parse(trimmed);
    if (obj.schema_version !== "v1") {
      throw new Error(`${filePath}:${index + 1}: unsupported schema_version ${obj.schema_version}`);
    }
    if (obj.records.length !== obj.labels.length) {
      throw new Error(`${filePath}:${index + 1}: records/labels length mismatch`);
    }
    if (obj.targets.length !== obj.records.length + 1) {
      throw new Error(`${filePath}:${index + 1}: targets must have depth+1 entries`);
    }
    out.push({
      queryId: obj.query_id,
      records: obj.records,
      labels: obj.labels,
      targets: obj.targets,
    });
  }
  if (out.length === 0) throw new Error(`${filePath}: no feature records`);
  return out;
}

export function readTargetFile(filePath: string): Map<string, number[]> {
  const vectors = new Map<string, number[]>();
  const text = fs.readFileSync(filePath, "utf-8");
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed || trimmed.startsWith("#")) continue;
    const parts = trimmed.split(/\s+/);
    vectors.set(parts[0], parts.slice(1).map(Number));
  }
  if (vectors.size === 0) throw new Error(`${filePath}: no target vectors`);
  return vectors;
}

/** Replace embedded targets with vectors from an external target file. */
export function overrideTargets(queries: QueryFeatures[], targets: Map<string, number[]>): void {
  for (const query of queries) {
    const vec = targets.get(query.queryId);
    if (!vec) throw new Error(`target file misses query ${query.queryId}`);
    if (vec.length !== query.targets.length) {
      throw new Error(
        `target length ${vec.length} != depth+1 (${query.targets.length}) for ${query.queryId}`,
      );
    }
    query.targets = vec;
  }
}

export function writePredictions(
  filePath: string,
  methodName: string,
  cutoffs: Map<string, number>,
): void {
  const lines = [`# method=${methodName}`];
  for (const qid of [...cutoffs.keys()].sort()) {
    lines.push(`${qid}\t${cutoffs.get(qid)}`);
  }
  fs.mkdirSync(path.dirname(filePath), { recursive: true });
  fs.writeFileSync(filePath, lines.join("\n") + "\n", "utf-8");
}

export function writeJson(filePath: string, value: unknown): void {
  fs.mkdirSync(path.dirname(filePath), { recursive: true });
  fs.writeFileSync(filePath, JSON.stringify(value, null, 2) + "\n", "utf-8");
}
