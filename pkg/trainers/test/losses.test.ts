import * as tf from "@tensorflow/tfjs";
import { beforeAll, describe, expect, test } from "vitest";

import { initBackend } from "../src/backend.js";
import {
  bicutLoss,
  bicutLossGradRef,
  bicutLossRef,
  crossEntropyTargetLoss,
  expectedTargetLoss,
  expectedTargetLossRef,
  marginPairLoss,
  relevanceBce,
} from "../src/losses.js";
import { mulberry32 } from "../src/prng.js";

beforeAll(async () => {
  await initBackend();
});

describe("bicut loss", () => {
  test("perfect continue on a relevant item costs nothing", () => {
    expect(bicutLossRef([1.0, 0.0], [1, 0], 0.4)).toBeCloseTo(0, 9);
  });

  test("perfect truncate on an irrelevant item costs nothing", () => {
    expect(bicutLossRef([0.9, 0.0], [1, 0], 0.4)).toBeCloseTo(
      bicutLossRef([0.9, 0.0], [1, 0], 0.4),
      12,
    );
    expect(bicutLossRef([1.0, 0.0], [1, 0], 0.7)).toBe(0);
  });

  test("hand case: y=1, p=0.5, r=0.5, eta=0.4 contributes 0.6", () => {
    // two-position list with r = 0.5; the irrelevant position has p=0 so
    // only the relevant term contributes: (1-0.4) * (1-0.5) / 0.5 = 0.6
    const loss = bicutLossRef([0.5, 0.0], [1, 0], 0.4);
    expect(loss).toBeCloseTo(0.6, 9);
  });

  test("degenerate lists (r = 0 or 1) are rejected", () => {
    expect(() => bicutLossRef([0.5], [1], 0.4)).toThrow(/degenerate/);
    expect(() => bicutLossRef([0.5, 0.5], [0, 0], 0.4)).toThrow(/degenerate/);
  });

  test("finite differences match the analytic gradient", () => {
    const rng = mulberry32(99);
    for (let trial = 0; trial < 25; trial++) {
      const n = 2 + Math.floor(rng() * 10);
      const y = Array.from({ length: n }, () => (rng() < 0.5 ? 1 : 0));
      if (!y.includes(1)) y[0] = 1;
      if (!y.includes(0)) y[n - 1] = 0;
      const p = Array.from({ length: n }, () => 0.05 + 0.9 * rng());
      const eta = 0.1 + 0.8 * rng();
      const analytic = bicutLossGradRef(p, y, eta);
      const h = 1e-6;
      for (let i = 0; i < n; i++) {
        const plus = [...p];
        const minus = [...p];
        plus[i] += h;
        minus[i] -= h;
        const fd = (bicutLossRef(plus, y, eta) - bicutLossRef(minus, y, eta)) / (2 * h);
        const relError = Math.abs(fd - analytic[i]) / Math.max(Math.abs(analytic[i]), 1e-12);
        expect(relError).toBeLessThan(1e-4);
      }
    }
  });

  test("tensor implementation matches the reference", () => {
    const rng = mulberry32(7);
    const n = 8;
    const lists = 5;
    const p: number[][] = [];
    const y: number[][] = [];
    let expected = 0;
    for (let b = 0; b < lists; b++) {
      const labels = Array.from({ length: n }, (_, i) => (i < 3 ? 1 : 0));
      const probs = Array.from({ length: n }, () => rng());
      p.push(probs);
      y.push(labels);
      expected += bicutLossRef(probs, labels, 0.4);
    }
    expected /= lists;
    const { loss, skipped } = bicutLoss(
      tf.tensor2d(p),
      tf.tensor2d(y),
      tf.ones([lists, n]),
      0.4,
    );
    expect(skipped).toBe(0);
    expect(loss.dataSync()[0]).toBeCloseTo(expected, 5);
  });

  test("degenerate lists are skipped with a counter", () => {
    const p = [
      [0.5, 0.5],
      [0.9, 0.1],
    ];
    const y = [
      [1, 1], // r = 1: degenerate
      [1, 0],
    ];
    const { loss, skipped } = bicutLoss(tf.tensor2d(p), tf.tensor2d(y), tf.ones([2, 2]), 0.4);
    expect(skipped).toBe(1);
    expect(loss.dataSync()[0]).toBeCloseTo(bicutLossRef([0.9, 0.1], [1, 0], 0.4), 5);
  });
});

describe("expected target loss", () => {
  test("one-hot at the argmax yields minus the max", () => {
    const targets = [0.1, 0.9, 0.3];
    expect(expectedTargetLossRef([0, 1, 0], targets)).toBeCloseTo(-0.9, 12);
  });

  test("uniform distribution yields minus the mean", () => {
    const targets = [0.3, 0.6, 0.9];
    const uniform = [1 / 3, 1 / 3, 1 / 3];
    expect(expectedTargetLossRef(uniform, targets)).toBeCloseTo(-0.6, 12);
  });

  test("all-zero targets cost nothing under any distribution", () => {
    expect(expectedTargetLossRef([0.2, 0.5, 0.3], [0, 0, 0])).toBe(0);
  });

  test("one-hot at argmax minimizes the loss over sampled distributions", () => {
    const rng = mulberry32(21);
    for (let trial = 0; trial < 50; trial++) {
      const n = 3 + Math.floor(rng() * 8);
      const targets = Array.from({ length: n }, () => rng());
      const best = targets.indexOf(Math.max(...targets));
      const oneHot = targets.map((_, i) => (i === best ? 1 : 0));
      const raw = Array.from({ length: n }, () => rng());
      const total = raw.reduce((a, b) => a + b, 0);
      const dist = raw.map((v) => v / total);
      expect(expectedTargetLossRef(oneHot, targets)).toBeLessThanOrEqual(
        expectedTargetLossRef(dist, targets) + 1e-12,
      );
    }
  });

  test("positive scaling of targets keeps the one-hot argmin unchanged", () => {
    const rng = mulberry32(22);
    for (let trial = 0; trial < 25; trial++) {
      const n = 4 + Math.floor(rng() * 6);
      const targets = Array.from({ length: n }, () => rng());
      const scale = 0.1 + 10 * rng();
      const argminOneHot = (t: number[]) => {
        let best = 0;
        for (let i = 0; i < n; i++) {
          const oneHot = t.map((_, j) => (j === i ? 1 : 0));
          const bestHot = t.map((_, j) => (j === best ? 1 : 0));
          if (expectedTargetLossRef(oneHot, t) < expectedTargetLossRef(bestHot, t)) best = i;
        }
        return best;
      };
      expect(argminOneHot(targets.map((v) => v * scale))).toBe(argminOneHot(targets));
    }
  });

  test("tensor implementation matches and rejects mismatched lengths", () => {
    const dist = tf.tensor2d([[0.2, 0.8]]);
    const targets = tf.tensor2d([[0.5, 0.25]]);
    expect(expectedTargetLoss(dist, targets).dataSync()[0]).toBeCloseTo(
      expectedTargetLossRef([0.2, 0.8], [0.5, 0.25]),
      6,
    );
    expect(() => expectedTargetLoss(dist, tf.tensor2d([[1, 2, 3]]))).toThrow(/mismatch/);
  });
});

describe("auxiliary losses", () => {
  test("cross-entropy against normalized targets prefers the peak", () => {
    const targets = tf.tensor2d([[0.0, 1.0, 0.0]]);
    const peaked = crossEntropyTargetLoss(tf.tensor2d([[0.05, 0.9, 0.05]]), targets);
    const flat = crossEntropyTargetLoss(tf.tensor2d([[1 / 3, 1 / 3, 1 / 3]]), targets);
    expect(peaked.dataSync()[0]).toBeLessThan(flat.dataSync()[0]);
  });

  test("relevance BCE is low when scores match labels", () => {
    const labels = tf.tensor2d([[1, 0, 1]]);
    const good = relevanceBce(tf.tensor2d([[0.95, 0.05, 0.95]]), labels, tf.ones([1, 3]));
    const bad = relevanceBce(tf.tensor2d([[0.05, 0.95, 0.05]]), labels, tf.ones([1, 3]));
    expect(good.dataSync()[0]).toBeLessThan(bad.dataSync()[0]);
  });

  test("margin loss vanishes once pairs are separated by the margin", () => {
    const scores = tf.tensor2d([[2.5, 0.2, 2.6, 0.1]]);
    const pairs = { listIdx: [0, 0], relIdx: [0, 2], irrIdx: [1, 3] };
    expect(marginPairLoss(scores, pairs).dataSync()[0]).toBeCloseTo(0, 6);
    const tight = tf.tensor2d([[0.5, 0.4, 0.6, 0.3]]);
    expect(marginPairLoss(tight, pairs).dataSync()[0]).toBeGreaterThan(0.5);
  });
});
