/** Thin CLI: `train <config.json>` fits a model and writes predictions,
 * a training log, and (optionally) a checkpoint; `predict <config.json>`
 * reloads the checkpoint and writes predictions for the eval features. */

import { loadConfig } from "./config.js";
import { predictFromConfig, trainFromConfig } from "./train.js";

async function main(): Promise<number> {
  const [command, configPath] = process.argv.slice(2);
  if (!command || !configPath || !["train", "predict"].includes(command)) {
    process.stderr.write("usage: cli.js train|predict CONFIG.json\n");
    return 2;
  }
  let config;
  try {
    config = loadConfig(configPath);
  } catch (error) {
    process.stderr.write(`config error: ${(error as Error).message}\n`);
    return 2;
  }
  try {
    const outcome =
      command === "train" ? await trainFromConfig(config) : await predictFromConfig(config);
    process.stderr.write(
      `${command} ${outcome.methodName}: ${outcome.cutoffs.size} predictions ` +
        `-> ${config.predictionsOut} (backend ${outcome.backend})\n`,
    );
    return 0;
  } catch (error) {
    process.stderr.write(`error: ${(error as Error).message}\n`);
    return 1;
  }
}

main().then((code) => process.exit(code));
