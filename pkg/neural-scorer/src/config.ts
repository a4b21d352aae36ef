export interface TrainerConfig {
  layers: number;
  hidden: number; // embedding size equals hidden size
  heads: number;
  batchSize: number; // sentences per batch
  dropout: number;
  learningRate: number;
  evalEvery: number; // batches between validation perplexity evaluations
  blockSize: number; // longest input sequence, BOS included
  gradClip: number;
  budgetSeconds: number; // wall-clock training threshold
  maxBatches: number;
  seed: number;
  label: string;
}

/** Reference word-level recipe, the full-scale configuration. */
export function defaultTrainerConfig(): TrainerConfig {
  return {
    layers: 4,
    hidden: 800,
    heads: 8,
    batchSize: 10,
    dropout: 0.2,
    learningRate: 5,
    evalEvery: 200,
    blockSize: 128,
    gradClip: 0.5,
    budgetSeconds: 48 * 3600,
    maxBatches: Number.POSITIVE_INFINITY,
    seed: 1,
    label: "transformer",
  };
}

/** Small configuration for tests and smoke runs. */
export function tinyTrainerConfig(): TrainerConfig {
  return {
    ...defaultTrainerConfig(),
    layers: 2,
    hidden: 64,
    heads: 2,
    blockSize: 48,
    evalEvery: 50,
    budgetSeconds: 10 * 60,
    label: "transformer-tiny",
  };
}

export type ScorerMode = "causal" | "masked";

export interface BackendConfig {
  modelPath: string;
  mode: ScorerMode;
  maxBatch: number;
}
