#!/usr/bin/env node
/** Command line:
 *
 *   node dist/cli.js train --train t.txt --valid v.txt --out ckpt.json \
 *       [--curve curve.csv] [--tiny] [--layers N --hidden N --heads N ...]
 *   node dist/cli.js serve --model ckpt.json [--max-batch N]
 */

import { parseArgs } from "node:util";

import { loadCheckpoint, saveCheckpoint } from "./checkpoint.js";
import { defaultTrainerConfig, tinyTrainerConfig } from "./config.js";
import { ScorerServer } from "./serve.js";
import { readCorpus } from "./tokenizer.js";
import { trainAndLog, writeCurveCsv } from "./trainer.js";

function trainCommand(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      train: { type: "string" },
      valid: { type: "string" },
      out: { type: "string" },
      curve: { type: "string" },
      label: { type: "string" },
      tiny: { type: "boolean", default: false },
      layers: { type: "string" },
      hidden: { type: "string" },
      heads: { type: "string" },
      "batch-size": { type: "string" },
      dropout: { type: "string" },
      lr: { type: "string" },
      "eval-every": { type: "string" },
      block: { type: "string" },
      "budget-seconds": { type: "string" },
      "max-batches": { type: "string" },
      seed: { type: "string" },
    },
  });
  if (!values.train || !values.valid || !values.out) {
    console.error("train requires --train, --valid and --out");
    return 2;
  }
  const cfg = values.tiny ? tinyTrainerConfig() : defaultTrainerConfig();
  const num = (s: string | undefined) => (s === undefined ? undefined : Number(s));
  cfg.layers = num(values.layers) ?? cfg.layers;
  cfg.hidden = num(values.hidden) ?? cfg.hidden;
  cfg.heads = num(values.heads) ?? cfg.heads;
  cfg.batchSize = num(values["batch-size"]) ?? cfg.batchSize;
  cfg.dropout = num(values.dropout) ?? cfg.dropout;
  cfg.learningRate = num(values.lr) ?? cfg.learningRate;
  cfg.evalEvery = num(values["eval-every"]) ?? cfg.evalEvery;
  cfg.blockSize = num(values.block) ?? cfg.blockSize;
  cfg.budgetSeconds = num(values["budget-seconds"]) ?? cfg.budgetSeconds;
  cfg.maxBatches = num(values["max-batches"]) ?? cfg.maxBatches;
  cfg.seed = num(values.seed) ?? cfg.seed;
  cfg.label = values.label ?? cfg.label;

  const train = readCorpus(values.train);
  const valid = readCorpus(values.valid);
  console.error(
    `training ${cfg.label}: ${cfg.layers} layers, hidden ${cfg.hidden}, ` +
      `${train.length} train sentences, ${valid.length} valid sentences`,
  );
  const result = trainAndLog(train, valid, cfg, (point) => {
    console.error(`batch ${point.batchIndex}: validation perplexity ${point.perplexity.toFixed(3)}`);
  });
  if (result.diverged) {
    console.error(
      `loss diverged at batch ${result.diverged.atBatch}; ` +
        `checkpoint restored from batch ${result.diverged.lastCheckpointBatch}`,
    );
  }
  saveCheckpoint(result.model, result.vocab, cfg.label, values.out);
  console.error(`saved checkpoint to ${values.out} after ${result.batchesRun} batches`);
  if (values.curve) {
    writeCurveCsv(result.curve, cfg.label, values.curve);
    console.error(`wrote ${result.curve.length} curve points to ${values.curve}`);
  }
  return result.diverged ? 1 : 0;
}

async function serveCommand(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      model: { type: "string" },
      "max-batch": { type: "string", default: "64" },
    },
  });
  if (!values.model) {
    console.error("serve requires --model");
    return 2;
  }
  const { model, vocab, scorerId } = loadCheckpoint(values.model);
  const server = new ScorerServer(model, vocab, scorerId, Number(values["max-batch"]));
  await server.run(process.stdin, process.stdout);
  return 0;
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  if (command === "train") return trainCommand(rest);
  if (command === "serve") return serveCommand(rest);
  console.error("usage: cli.js {train|serve} ...");
  return 2;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(err);
    process.exit(1);
  },
);
