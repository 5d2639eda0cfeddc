/** tfjs backend selection: wasm (SIMD) with a single thread for
 * reproducibility, falling back to the plain cpu backend. */

import * as tf from "@tensorflow/tfjs";
import { setThreadsCount } from "@tensorflow/tfjs-backend-wasm";

let initialized: Promise<string> | null = null;

export function initBackend(): Promise<string> {
  if (!initialized) {
    initialized = (async () => {
      try {
        setThreadsCount(1);
        await tf.setBackend("wasm");
      } catch {
        await tf.setBackend("cpu");
      }
      await tf.ready();
      return tf.getBackend();
    })();
  }
  return initialized;
}
