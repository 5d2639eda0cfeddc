/** Bidirectional LSTM with a hand-written backward pass.
 *
 * tf.layers.lstm dispatches hundreds of tiny taped ops per timestep,
 * which is unusably slow (and memory-hungry) on the wasm backend.  Two
 * tricks keep this implementation fast on one core:
 *
 * - both directions run in a single loop: the input is stacked as
 *   [2, B, L, F] with the second half time-reversed, and each direction
 *   keeps its own weights via rank-3 batched matmuls, so one op advances
 *   both recurrences;
 * - the gradient is written out by hand and registered with
 *   tf.customGrad, so the tape holds a few stacked activations instead
 *   of every per-timestep intermediate.
 *
 * Gate layout along the last axis of the [2, F, 4H] / [2, H, 4H]
 * weights: input i, forget f, candidate g, output o,
 *
 *   c_t = sigmoid(f) * c_{t-1} + sigmoid(i) * tanh(g)
 *   h_t = sigmoid(o) * tanh(c_t)
 *
 * Correctness is pinned by tests against a plain autograd reference.
 */

import * as tf from "@tensorflow/tfjs";

import { glorot, type Rng } from "./prng.js";

/** tanh via the sigmoid kernel: the wasm tanh kernel is several times
 * slower than sigmoid, and tanh(x) = 2*sigmoid(2x) - 1 exactly. */
function fastTanh(x: tf.Tensor): tf.Tensor {
  return x.mul(2).sigmoid().mul(2).sub(1);
}

export interface BiLstmVars {
  /** [2, F, 4H]: direction 0 forward, direction 1 backward. */
  Wx: tf.Variable;
  /** [2, H, 4H] */
  Wh: tf.Variable;
  /** [2, 1, 4H] */
  b: tf.Variable;
  hidden: number;
}

export function makeBiLstmVars(rng: Rng, inputDim: number, hidden: number): BiLstmVars {
  const wx = new Float32Array(2 * inputDim * 4 * hidden);
  wx.set(glorot(rng, inputDim, 4 * hidden), 0);
  wx.set(glorot(rng, inputDim, 4 * hidden), inputDim * 4 * hidden);
  const wh = new Float32Array(2 * hidden * 4 * hidden);
  wh.set(glorot(rng, hidden, 4 * hidden), 0);
  wh.set(glorot(rng, hidden, 4 * hidden), hidden * 4 * hidden);
  // forget-gate bias starts at 1 so early training does not forget everything
  const bias = new Float32Array(2 * 4 * hidden);
  bias.fill(1.0, hidden, 2 * hidden);
  bias.fill(1.0, 4 * hidden + hidden, 4 * hidden + 2 * hidden);
  return {
    Wx: tf.variable(tf.tensor3d(wx, [2, inputDim, 4 * hidden])),
    Wh: tf.variable(tf.tensor3d(wh, [2, hidden, 4 * hidden])),
    b: tf.variable(tf.tensor3d(bias, [2, 1, 4 * hidden])),
    hidden,
  };
}

export function biLstmVarList(vars: BiLstmVars): tf.Variable[] {
  return [vars.Wx, vars.Wh, vars.b];
}

/** Both directions, forward in time over a [2, B, L, F] stacked input. */
const runStacked = tf.customGrad((...args: unknown[]) => {
  const [x2, Wx, Wh, b] = args.slice(0, 4) as tf.Tensor[];
  const save = args[4] as tf.GradSaveFunc;
  const [, B, L, F] = x2.shape as [number, number, number, number];
  const H = Wh.shape[1] as number;

  // wasm's batched matmul is a slow fallback: keep every matmul rank-2
  const splitPair = (w: tf.Tensor, rows: number, cols: number): tf.Tensor2D[] => [
    w.slice([0, 0, 0], [1, rows, cols]).reshape([rows, cols]) as tf.Tensor2D,
    w.slice([1, 0, 0], [1, rows, cols]).reshape([rows, cols]) as tf.Tensor2D,
  ];
  const [Wx0, Wx1] = splitPair(Wx, F, 4 * H);
  const [Wh0, Wh1] = splitPair(Wh, H, 4 * H);
  const xFlat2 = x2.reshape([2, B * L, F]);
  const proj0 = tf.matMul(
    xFlat2.slice([0, 0, 0], [1, B * L, F]).reshape([B * L, F]) as tf.Tensor2D,
    Wx0,
  );
  const proj1 = tf.matMul(
    xFlat2.slice([1, 0, 0], [1, B * L, F]).reshape([B * L, F]) as tf.Tensor2D,
    Wx1,
  );
  const xProj = tf.stack([proj0, proj1], 0).add(b).reshape([2, B, L, 4 * H]);
  const xSteps = tf.unstack(xProj.transpose([2, 0, 1, 3]), 0); // L x [2, B, 4H]

  const pairMatMul = (hBoth: tf.Tensor, w0: tf.Tensor2D, w1: tf.Tensor2D): tf.Tensor => {
    const [h0, h1] = tf.unstack(hBoth, 0);
    return tf.stack(
      [tf.matMul(h0 as tf.Tensor2D, w0), tf.matMul(h1 as tf.Tensor2D, w1)],
      0,
    );
  };

  let h: tf.Tensor = tf.zeros([2, B, H]);
  let c: tf.Tensor = tf.zeros([2, B, H]);
  const hs = new Array<tf.Tensor>(L);
  const cs = new Array<tf.Tensor>(L);
  const gateActs = new Array<tf.Tensor>(L);
  for (let t = 0; t < L; t++) {
    const pre = xSteps[t].add(pairMatMul(h, Wh0, Wh1));
    // gate layout [i | f | g | o]: one sigmoid covers i,f and one o
    const sig = pre.sigmoid(); // tanh(g) recovered from sigmoid(2g) below
    const i = sig.slice([0, 0, 0], [2, B, H]);
    const f = sig.slice([0, 0, H], [2, B, H]);
    const o = sig.slice([0, 0, 3 * H], [2, B, H]);
    const g = fastTanh(pre.slice([0, 0, 2 * H], [2, B, H]));
    c = f.mul(c).add(i.mul(g));
    h = o.mul(fastTanh(c));
    hs[t] = h;
    cs[t] = c;
    gateActs[t] = tf.concat([i, f, g, o], -1);
  }
  const value = tf.stack(hs, 2) as tf.Tensor4D; // [2, B, L, H]
  save([x2, Wx as tf.Tensor, Wh as tf.Tensor, tf.stack(cs, 2), tf.stack(gateActs, 2)]);

  const gradFunc = (dy: tf.Tensor, saved: tf.Tensor[]) => {
    const [xS, WxS, WhS, cAll, gatesAll] = saved;
    const [, B2, L2, H2] = dy.shape as [number, number, number, number];
    const F2 = xS.shape[3] as number;
    const one = tf.scalar(1);

    // pointwise derivative factors, vectorized over [2, B, L, H]
    const [iA, fA, gA, oA] = tf.split(gatesAll, 4, -1);
    const tanhC = fastTanh(cAll);
    const factorO = tanhC.mul(oA).mul(one.sub(oA)); // da_o = dh * factorO
    const factorC = oA.mul(one.sub(tanhC.square())); // dc += dh * factorC
    const factorI = gA.mul(iA).mul(one.sub(iA)); // da_i = dc * factorI
    const factorF = fA.mul(one.sub(fA)); // da_f = dc * c_prev * factorF
    const factorG = iA.mul(one.sub(gA.square())); // da_g = dc * factorG

    const perStep = (t: tf.Tensor) => tf.unstack(t.transpose([2, 0, 1, 3]), 0);
    const dySteps = perStep(dy);
    const fSteps = perStep(fA);
    const cSteps = perStep(cAll);
    const facOSteps = perStep(factorO);
    const facCSteps = perStep(factorC);
    const facISteps = perStep(factorI);
    const facFSteps = perStep(factorF);
    const facGSteps = perStep(factorG);

    const splitPairB = (w: tf.Tensor, rows: number, cols: number): tf.Tensor2D[] => [
      w.slice([0, 0, 0], [1, rows, cols]).reshape([rows, cols]) as tf.Tensor2D,
      w.slice([1, 0, 0], [1, rows, cols]).reshape([rows, cols]) as tf.Tensor2D,
    ];
    const [whT0, whT1] = splitPairB(WhS, H2, 4 * H2).map(
      (w) => tf.transpose(w) as tf.Tensor2D,
    );
    const zero = tf.zeros([2, B2, H2]);
    const daAll = new Array<tf.Tensor>(L2);
    let dhCarry: tf.Tensor = zero;
    let dcNext: tf.Tensor = zero;
    for (let t = L2 - 1; t >= 0; t--) {
      const dh = dySteps[t].add(dhCarry);
      const daO = dh.mul(facOSteps[t]);
      const dc = dh.mul(facCSteps[t]).add(dcNext);
      const cPrev = t > 0 ? cSteps[t - 1] : zero;
      const daF = dc.mul(cPrev).mul(facFSteps[t]);
      const daI = dc.mul(facISteps[t]);
      const daG = dc.mul(facGSteps[t]);
      const da = tf.concat([daI, daF, daG, daO], -1); // [2, B, 4H]
      daAll[t] = da;
      const [da0, da1] = tf.unstack(da, 0);
      dhCarry = tf.stack(
        [tf.matMul(da0 as tf.Tensor2D, whT0), tf.matMul(da1 as tf.Tensor2D, whT1)],
        0,
      );
      dcNext = dc.mul(fSteps[t]);
    }
    const daFlat = tf.stack(daAll, 2).reshape([2, B2 * L2, 4 * H2]) as tf.Tensor3D;

    // h_{t-1}, step-aligned: h (= o * tanh(c)) shifted right by one step
    const hAll = oA.mul(tanhC); // [2, B, L, H]
    const hPrev = tf.concat(
      [tf.zeros([2, B2, 1, H2]), hAll.slice([0, 0, 0, 0], [2, B2, L2 - 1, H2])],
      2,
    );

    const rows = B2 * L2;
    const per = (t: tf.Tensor, cols: number, half: number): tf.Tensor2D =>
      t.slice([half, 0, 0], [1, rows, cols]).reshape([rows, cols]) as tf.Tensor2D;
    const xFlat = xS.reshape([2, rows, F2]);
    const hPrevFlat = hPrev.reshape([2, rows, H2]);
    const [wx0, wx1] = splitPairB(WxS, F2, 4 * H2);
    const dWx = tf.stack([
      tf.matMul(per(xFlat, F2, 0), per(daFlat, 4 * H2, 0), true, false),
      tf.matMul(per(xFlat, F2, 1), per(daFlat, 4 * H2, 1), true, false),
    ]);
    const dWh = tf.stack([
      tf.matMul(per(hPrevFlat, H2, 0), per(daFlat, 4 * H2, 0), true, false),
      tf.matMul(per(hPrevFlat, H2, 1), per(daFlat, 4 * H2, 1), true, false),
    ]);
    const db = daFlat.sum(1, true);
    const dx = tf
      .stack([
        tf.matMul(per(daFlat, 4 * H2, 0), wx0, false, true),
        tf.matMul(per(daFlat, 4 * H2, 1), wx1, false, true),
      ])
      .reshape([2, B2, L2, F2]);
    return [dx, dWx, dWh, db];
  };
  return { value, gradFunc };
});

/** [B, L, F] -> [B, L, 2H]: forward and backward outputs concatenated. */
export function biLstm(x: tf.Tensor3D, vars: BiLstmVars): tf.Tensor3D {
  const [B, L] = x.shape;
  const stacked = tf.stack([x, tf.reverse(x, 1)], 0); // [2, B, L, F]
  const out = runStacked(stacked, vars.Wx, vars.Wh, vars.b) as tf.Tensor4D;
  const fwd = out.slice([0, 0, 0, 0], [1, B, L, vars.hidden]).squeeze([0]) as tf.Tensor3D;
  const bwd = out.slice([1, 0, 0, 0], [1, B, L, vars.hidden]).squeeze([0]) as tf.Tensor3D;
  return tf.concat([fwd, tf.reverse(bwd, 1)], -1);
}

/** Plain autograd reference used only to validate the custom gradient. */
export function biLstmReference(x: tf.Tensor3D, vars: BiLstmVars): tf.Tensor3D {
  const [B, L, F] = x.shape;
  const H = vars.hidden;
  const runOne = (input: tf.Tensor3D, dir: number): tf.Tensor3D => {
    const Wx = vars.Wx.slice([dir, 0, 0], [1, F, 4 * H]).reshape([F, 4 * H]) as tf.Tensor2D;
    const Wh = vars.Wh.slice([dir, 0, 0], [1, H, 4 * H]).reshape([H, 4 * H]) as tf.Tensor2D;
    const b = vars.b.slice([dir, 0, 0], [1, 1, 4 * H]).reshape([4 * H]);
    const xProj = tf.matMul(input.reshape([B * L, F]), Wx).add(b).reshape([B, L, 4 * H]);
    let h: tf.Tensor = tf.zeros([B, H]);
    let c: tf.Tensor = tf.zeros([B, H]);
    const outs = new Array<tf.Tensor>(L);
    for (let t = 0; t < L; t++) {
      const pre = xProj
        .slice([0, t, 0], [B, 1, 4 * H])
        .reshape([B, 4 * H])
        .add(tf.matMul(h as tf.Tensor2D, Wh));
      const [iRaw, fRaw, gRaw, oRaw] = tf.split(pre, 4, -1);
      c = fRaw.sigmoid().mul(c).add(iRaw.sigmoid().mul(gRaw.tanh()));
      h = oRaw.sigmoid().mul(c.tanh());
      outs[t] = h;
    }
    return tf.stack(outs, 1) as tf.Tensor3D;
  };
  const fwd = runOne(x, 0);
  const bwd = tf.reverse(runOne(tf.reverse(x, 1) as tf.Tensor3D, 1), 1);
  return tf.concat([fwd, bwd], -1);
}
