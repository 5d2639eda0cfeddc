import { beforeAll, expect, test } from "vitest";

import { initBackend } from "../src/backend.js";
import { exactMatchRate, runLearnability } from "./learn_helper.js";

beforeAll(async () => {
  await initBackend();
});

test("attncut reaches >= 90% exact-match argmax accuracy on the step task", async () => {
  const run = await runLearnability("attncut", 1e-3);
  const accuracy = exactMatchRate(run);
  console.log(`attncut exact-match accuracy: ${(accuracy * 100).toFixed(1)}%`);
  expect(accuracy).toBeGreaterThanOrEqual(0.9);
});
