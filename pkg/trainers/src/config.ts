/** Training configuration: one JSON document per run. */

import * as fs from "node:fs";
import * as path from "node:path";

import type { MethodName } from "./models.js";

export type LossName = "expected_reward" | "cross_entropy";

export interface TrainConfig {
  method: MethodName;
  featuresTrain: string;
  featuresEval: string;
  /** Optional separate target file overriding the targets embedded in the features. */
  targetsTrain: string | null;
  /** Which trade-off the targets encode; recorded in the method name and log. */
  betaTag: string;
  eta: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
  seed: number;
  listDepth: number;
  loss: LossName;
  predictionsOut: string;
  logOut: string;
  checkpointOut: string | null;
}

export const DEFAULT_LEARNING_RATES: Record<MethodName, number> = {
  bicut: 1e-4,
  choppy: 1e-3,
  attncut: 3e-5,
  mtcut: 3e-5,
  lecut: 3e-5,
};

export const METHODS: MethodName[] = ["bicut", "choppy", "attncut", "mtcut", "lecut"];

export function loadConfig(configPath: string): TrainConfig {
  const raw = JSON.parse(fs.readFileSync(configPath, "utf-8"));
  const dir = path.dirname(path.resolve(configPath));
  const resolve = (p: string | null | undefined): string | null =>
    p == null ? null : path.isAbsolute(p) ? p : path.join(dir, p);

  const method = raw.method as MethodName;
  if (!METHODS.includes(method)) {
    throw new Error(`unknown method ${raw.method}; expected one of ${METHODS.join(", ")}`);
  }
  const epochs = raw.epochs ?? 100;
  const batchSize = raw.batch_size ?? 64;
  if (epochs < 1) throw new Error("epochs must be >= 1");
  if (batchSize < 1) throw new Error("batch_size must be >= 1");
  const eta = raw.eta ?? 0.5;
  if (eta < 0 || eta > 1) throw new Error("eta must lie in [0, 1]");
  const loss = raw.loss ?? "expected_reward";
  if (loss !== "expected_reward" && loss !== "cross_entropy") {
    throw new Error(`unknown loss ${raw.loss}`);
  }
  for (const key of ["features_train", "features_eval", "predictions_out", "log_out"]) {
    if (!raw[key]) throw new Error(`config field ${key} is required`);
  }
  const listDepth = raw.list_depth ?? 1000;
  if (listDepth < 1) throw new Error("list_depth must be >= 1");
  return {
    method,
    featuresTrain: resolve(raw.features_train)!,
    featuresEval: resolve(raw.features_eval)!,
    targetsTrain: resolve(raw.targets_train),
    betaTag: raw.beta_tag ?? "beta0",
    eta,
    epochs,
    batchSize,
    learningRate: raw.learning_rate ?? DEFAULT_LEARNING_RATES[method],
    seed: raw.seed ?? 13,
    listDepth,
    loss,
    predictionsOut: resolve(raw.predictions_out)!,
    logOut: resolve(raw.log_out)!,
    checkpointOut: resolve(raw.checkpoint_out),
  };
}

export function methodLabel(config: TrainConfig): string {
  return config.method === "bicut"
    ? `bicut_eta${config.eta}`
    : `${config.method}_${config.betaTag}`;
}
