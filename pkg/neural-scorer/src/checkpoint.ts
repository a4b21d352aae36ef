import { readFileSync, writeFileSync } from "node:fs";
import * as tf from "@tensorflow/tfjs";

import { ModelConfig, TransformerLM } from "./model.js";
import { Vocabulary } from "./tokenizer.js";

const FORMAT = "neural-scorer-checkpoint";

export interface Checkpoint {
  model: TransformerLM;
  vocab: Vocabulary;
  scorerId: string;
}

export function saveCheckpoint(
  model: TransformerLM,
  vocab: Vocabulary,
  scorerId: string,
  path: string,
): void {
  const weights: Record<string, { shape: number[]; data: string }> = {};
  for (const [name, w] of Object.entries(model.weightArrays())) {
    weights[name] = {
      shape: w.shape,
      data: Buffer.from(w.values.buffer, w.values.byteOffset, w.values.byteLength).toString(
        "base64",
      ),
    };
  }
  const payload = {
    format: FORMAT,
    version: 1,
    scorer_id: scorerId,
    config: model.cfg,
    vocabulary: vocab.tokens,
    weights,
  };
  writeFileSync(path, JSON.stringify(payload));
}

export function loadCheckpoint(path: string): Checkpoint {
  const payload = JSON.parse(readFileSync(path, "utf-8"));
  if (payload.format !== FORMAT) {
    throw new Error(`${path} is not a ${FORMAT} file`);
  }
  const cfg = payload.config as ModelConfig;
  const weights: Record<string, tf.Tensor> = {};
  for (const [name, entry] of Object.entries(
    payload.weights as Record<string, { shape: number[]; data: string }>,
  )) {
    const buffer = Buffer.from(entry.data, "base64");
    const values = new Float32Array(buffer.buffer, buffer.byteOffset, buffer.byteLength / 4);
    weights[name] = tf.tensor(Array.from(values), entry.shape, "float32");
  }
  const model = new TransformerLM(cfg, weights);
  Object.values(weights).forEach((w) => w.dispose());
  return {
    model,
    vocab: new Vocabulary(payload.vocabulary),
    scorerId: payload.scorer_id ?? "neural-scorer",
  };
}
