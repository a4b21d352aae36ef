import { writeFileSync } from "node:fs";
import * as tf from "@tensorflow/tfjs";

import { TrainerConfig } from "./config.js";
import { TransformerLM } from "./model.js";
import { Vocabulary } from "./tokenizer.js";

export interface CurvePoint {
  batchIndex: number;
  perplexity: number;
}

export interface TrainResult {
  model: TransformerLM;
  vocab: Vocabulary;
  curve: CurvePoint[];
  batchesRun: number;
  diverged: { atBatch: number; lastCheckpointBatch: number } | null;
}

interface Batch {
  inputs: tf.Tensor;
  targets: tf.Tensor;
  mask: tf.Tensor;
}

/** Pad a group of sentences into (inputs, targets, mask) id tensors.
    Input row: <s> w1 .. wn; target row: w1 .. wn </s>; pads masked out. */
function makeBatch(sentences: string[][], vocab: Vocabulary, blockSize: number): Batch {
  const rows = sentences.map((s) => {
    const ids = vocab.encode(s).slice(0, blockSize - 1);
    return {
      input: [vocab.bosId, ...ids],
      target: [...ids, vocab.eosId],
    };
  });
  const width = Math.max(...rows.map((r) => r.input.length));
  const inputs: number[][] = [];
  const targets: number[][] = [];
  const mask: number[][] = [];
  for (const row of rows) {
    const pad = width - row.input.length;
    inputs.push([...row.input, ...Array(pad).fill(vocab.padId)]);
    targets.push([...row.target, ...Array(pad).fill(vocab.padId)]);
    mask.push([...Array(row.input.length).fill(1), ...Array(pad).fill(0)]);
  }
  return {
    inputs: tf.tensor2d(inputs, undefined, "int32"),
    targets: tf.tensor2d(targets, undefined, "int32"),
    mask: tf.tensor2d(mask, undefined, "float32"),
  };
}

function disposeBatch(batch: Batch): void {
  batch.inputs.dispose();
  batch.targets.dispose();
  batch.mask.dispose();
}

/** exp of mean negative log-probability per target over the validation split. */
export function validationPerplexity(
  model: TransformerLM,
  valid: string[][],
  vocab: Vocabulary,
  batchSize: number,
  blockSize: number,
): number {
  let nll = 0;
  let count = 0;
  for (let lo = 0; lo < valid.length; lo += batchSize) {
    const batch = makeBatch(valid.slice(lo, lo + batchSize), vocab, blockSize);
    const r = model.evalNll(batch.inputs, batch.targets, batch.mask);
    nll += r.nll;
    count += r.count;
    disposeBatch(batch);
  }
  return Math.exp(nll / count);
}

/** Incremental training with periodic validation perplexity.

    Walks the training sentences in order, `batchSize` sentences per batch,
    looping over epochs until the wall-clock budget or the batch cap is hit.
    Every `evalEvery` batches the validation perplexity is recorded. A
    non-finite loss aborts training; the weights then still hold the last
    evaluated state (weights are snapshotted at each evaluation point). */
export function trainAndLog(
  train: string[][],
  valid: string[][],
  cfg: TrainerConfig,
  onPoint?: (point: CurvePoint) => void,
): TrainResult {
  if (train.length === 0 || valid.length === 0) {
    throw new Error("training and validation corpora must be non-empty");
  }
  const vocab = Vocabulary.fromSentences([...train, ...valid]);
  const model = new TransformerLM({
    vocabSize: vocab.size,
    blockSize: cfg.blockSize,
    layers: cfg.layers,
    hidden: cfg.hidden,
    heads: cfg.heads,
    dropout: cfg.dropout,
    seed: cfg.seed,
  });
  const optimizer = tf.train.sgd(cfg.learningRate);

  const curve: CurvePoint[] = [];
  const deadline = Date.now() + cfg.budgetSeconds * 1000;
  let batchIndex = 0;
  let diverged: TrainResult["diverged"] = null;
  let snapshot: Record<string, { shape: number[]; values: Float32Array }> | null = null;
  let snapshotBatch = 0;

  outer: while (batchIndex < cfg.maxBatches && Date.now() < deadline) {
    for (let lo = 0; lo < train.length; lo += cfg.batchSize) {
      if (batchIndex >= cfg.maxBatches || Date.now() >= deadline) break outer;
      const batch = makeBatch(train.slice(lo, lo + cfg.batchSize), vocab, cfg.blockSize);
      const loss = model.trainStep(batch.inputs, batch.targets, batch.mask, optimizer, cfg.gradClip);
      disposeBatch(batch);
      batchIndex += 1;
      if (!Number.isFinite(loss)) {
        diverged = { atBatch: batchIndex, lastCheckpointBatch: snapshotBatch };
        if (snapshot) {
          for (const [name, w] of Object.entries(snapshot)) {
            model.vars[name].assign(tf.tensor(Array.from(w.values), w.shape, "float32"));
          }
        }
        break outer;
      }
      if (batchIndex % cfg.evalEvery === 0) {
        const perplexity = validationPerplexity(model, valid, vocab, cfg.batchSize, cfg.blockSize);
        const point = { batchIndex, perplexity };
        curve.push(point);
        onPoint?.(point);
        // only a finitely-evaluating model counts as a good checkpoint
        if (Number.isFinite(perplexity)) {
          snapshot = model.weightArrays();
          snapshotBatch = batchIndex;
        }
      }
    }
  }
  optimizer.dispose();
  return { model, vocab, curve, batchesRun: batchIndex, diverged };
}

/** Same CSV schema as the n-gram learning curves: batch_index,perplexity,label. */
export function writeCurveCsv(curve: CurvePoint[], label: string, path: string): void {
  const lines = ["batch_index,perplexity,label"];
  for (const point of curve) {
    lines.push(`${point.batchIndex},${point.perplexity},${label}`);
  }
  writeFileSync(path, lines.join("\n") + "\n");
}
