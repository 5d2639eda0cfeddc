import * as tf from "@tensorflow/tfjs";
import { beforeAll, describe, expect, test } from "vitest";

import { initBackend } from "../src/backend.js";
import { biLstm, biLstmReference, makeBiLstmVars } from "../src/lstm.js";
import { mulberry32 } from "../src/prng.js";

beforeAll(async () => {
  await initBackend();
});

describe("custom-gradient bidirectional LSTM", () => {
  const B = 3;
  const L = 7;
  const F = 4;
  const H = 5;

  function setup(seed: number) {
    const rng = mulberry32(seed);
    const vars = makeBiLstmVars(rng, F, H);
    const x = tf.tensor3d(
      Array.from({ length: B * L * F }, () => rng() - 0.5),
      [B, L, F],
    );
    return { vars, x, rng };
  }

  test("forward pass matches the autograd reference", () => {
    const { vars, x } = setup(11);
    const custom = biLstm(x, vars);
    const reference = biLstmReference(x, vars);
    expect(custom.shape).toEqual([B, L, 2 * H]);
    // the production path computes tanh via the sigmoid identity, so
    // agreement is to float32 rounding rather than bitwise
    expect(custom.sub(reference).abs().max().dataSync()[0]).toBeLessThan(1e-6);
  });

  test("custom gradients match autograd through the reference", () => {
    const { vars, x, rng } = setup(12);
    const target = tf.tensor3d(
      Array.from({ length: B * L * 2 * H }, () => rng() - 0.5),
      [B, L, 2 * H],
    );
    const lossCustom = (xx: tf.Tensor3D, Wx: tf.Tensor, Wh: tf.Tensor, b: tf.Tensor) =>
      biLstm(xx, { Wx, Wh, b, hidden: H } as never)
        .mul(target)
        .sum();
    const lossRef = (xx: tf.Tensor3D, Wx: tf.Tensor, Wh: tf.Tensor, b: tf.Tensor) =>
      biLstmReference(xx, { Wx, Wh, b, hidden: H } as never)
        .mul(target)
        .sum();
    const gCustom = tf.grads(lossCustom as never)([x, vars.Wx, vars.Wh, vars.b]);
    const gRef = tf.grads(lossRef as never)([x, vars.Wx, vars.Wh, vars.b]);
    for (let i = 0; i < 4; i++) {
      const diff = gCustom[i].sub(gRef[i]).abs().max().dataSync()[0];
      const scale = gRef[i].abs().max().dataSync()[0];
      expect(diff).toBeLessThan(1e-5 * Math.max(scale, 1));
    }
  });

  test("direction weights are independent", () => {
    const { vars, x } = setup(13);
    const base = biLstm(x, vars).arraySync() as number[][][];
    // perturb only the backward-direction input weights
    const bump = tf.tensor3d(
      Array.from({ length: 2 * F * 4 * H }, (_, i) => (i >= F * 4 * H ? 0.25 : 0)),
      [2, F, 4 * H],
    );
    vars.Wx.assign(vars.Wx.add(bump));
    const after = biLstm(x, vars).arraySync() as number[][][];
    for (let b = 0; b < B; b++) {
      for (let t = 0; t < L; t++) {
        for (let j = 0; j < H; j++) {
          expect(after[b][t][j]).toBe(base[b][t][j]); // forward half unchanged
        }
      }
    }
    expect(
      (tf.tensor(after).sub(tf.tensor(base)) as tf.Tensor).abs().max().dataSync()[0],
    ).toBeGreaterThan(0);
  });
});
