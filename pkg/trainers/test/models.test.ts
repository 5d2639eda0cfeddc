import * as tf from "@tensorflow/tfjs";
import { beforeAll, describe, expect, test } from "vitest";

import { maskedSoftmax } from "../src/attention.js";
import { initBackend } from "../src/backend.js";
import { buildModel, bicutPredict, distributionPredict } from "../src/models.js";
import { mulberry32 } from "../src/prng.js";

beforeAll(async () => {
  await initBackend();
});

const B = 2;
const L = 10;
const F = 7;

function randomInputs(seed: number, realLengths: number[]) {
  const rng = mulberry32(seed);
  const features = tf.tensor3d(
    Array.from({ length: B * L * F }, () => rng()),
    [B, L, F],
  );
  const maskData = new Float32Array(B * L);
  realLengths.forEach((len, b) => {
    for (let i = 0; i < len; i++) maskData[b * L + i] = 1;
  });
  const mask = tf.tensor2d(maskData, [B, L]);
  const embeddings = tf.tensor3d(
    Array.from({ length: B * L * 8 }, () => rng() - 0.5),
    [B, L, 8],
  );
  return { features, mask, embeddings };
}

describe("model outputs", () => {
  test.each(["choppy", "attncut", "mtcut", "lecut"] as const)(
    "%s produces a masked distribution summing to 1",
    (method) => {
      const inputs = randomInputs(5, [L, 6]);
      const model = buildModel(method, F, 8, 42);
      const logits = tf.tidy(() => model.forward(inputs));
      expect(logits.shape).toEqual([B, L]);
      const dist = maskedSoftmax(logits, inputs.mask);
      const sums = dist.sum(-1).arraySync() as number[];
      for (const s of sums) expect(Math.abs(s - 1)).toBeLessThan(1e-6);
      // padded positions carry no probability mass
      const probs = dist.arraySync() as number[][];
      for (let i = 6; i < L; i++) expect(probs[1][i]).toBeLessThan(1e-9);
      model.dispose();
    },
  );

  test("bicut produces probabilities in [0, 1]", () => {
    const inputs = randomInputs(6, [L, L]);
    const model = buildModel("bicut", F, 0, 43);
    const probs = tf.tidy(() => model.forward({ ...inputs, mask: null }));
    const values = probs.dataSync() as Float32Array;
    for (const v of values) {
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(1);
    }
    model.dispose();
  });

  test("lecut refuses to build without embeddings", () => {
    expect(() => buildModel("lecut", F, 0, 44)).toThrow(/dense_embedding/);
  });

  test("mtcut exposes a relevance head on the shared trunk", () => {
    const inputs = randomInputs(7, [L, L]);
    const model = buildModel("mtcut", F, 0, 45);
    const scores = tf.tidy(() => model.relevanceHead!({ ...inputs, mask: null }));
    expect(scores.shape).toEqual([B, L]);
    const values = scores.dataSync() as Float32Array;
    for (const v of values) {
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(1);
    }
    model.dispose();
  });
});

describe("prediction rules", () => {
  test("bicut cuts at the first below-threshold position", () => {
    expect(bicutPredict([0.9, 0.8, 0.3, 0.9], 4)).toBe(2);
    expect(bicutPredict([0.9, 0.8, 0.9, 0.7], 4)).toBe(4); // never truncates
    expect(bicutPredict([0.1, 0.9], 2)).toBe(1); // floored at one item
  });

  test("distribution methods cut at the argmax position + 1", () => {
    expect(distributionPredict([0.1, 2.0, 0.3], 3)).toBe(2);
    expect(distributionPredict([5.0, 2.0, 0.3], 3)).toBe(1);
    // padded logits beyond the real length are ignored
    expect(distributionPredict([0.1, 0.2, 9.9], 2)).toBe(2);
  });
});
