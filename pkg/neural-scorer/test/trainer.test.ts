import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { tinyTrainerConfig } from "../src/config.js";
import { trainAndLog, writeCurveCsv } from "../src/trainer.js";
import { syntheticCorpus, tokenCount } from "./helpers.js";

describe("trainAndLog", () => {
  it("improves validation perplexity on a 100K-token corpus (tiny config)", () => {
    // 20,000 five-token sentences: a 100K-token training split.
    const train = syntheticCorpus(20_000, 3);
    const valid = syntheticCorpus(400, 4);
    expect(tokenCount(train)).toBe(100_000);

    const cfg = tinyTrainerConfig();
    cfg.maxBatches = 300; // a slice of the first epoch is enough to learn
    cfg.evalEvery = 50;
    const result = trainAndLog(train, valid, cfg);

    expect(result.diverged).toBeNull();
    expect(result.batchesRun).toBe(300);
    expect(result.curve.length).toBe(6);
    expect(result.curve.map((p) => p.batchIndex)).toEqual([50, 100, 150, 200, 250, 300]);
    const first = result.curve[0].perplexity;
    const last = result.curve[result.curve.length - 1].perplexity;
    expect(last).toBeGreaterThan(1);
    expect(last).toBeLessThan(first);

    const dir = mkdtempSync(join(tmpdir(), "ns-curve-"));
    const csvPath = join(dir, "curve.csv");
    writeCurveCsv(result.curve, cfg.label, csvPath);
    const lines = readFileSync(csvPath, "utf-8").trim().split("\n");
    expect(lines[0]).toBe("batch_index,perplexity,label");
    expect(lines.length).toBe(7);
    for (const line of lines.slice(1)) {
      const [batch, ppl, label] = line.split(",");
      expect(Number.isInteger(Number(batch))).toBe(true);
      expect(Number(ppl)).toBeGreaterThan(0);
      expect(label).toBe(cfg.label);
    }
    result.model.dispose();
  });

  it("aborts on divergence and restores the last evaluated weights", () => {
    const train = syntheticCorpus(500, 5);
    const valid = syntheticCorpus(50, 6);
    const cfg = tinyTrainerConfig();
    cfg.layers = 1;
    cfg.hidden = 32;
    cfg.blockSize = 16;
    cfg.evalEvery = 2;
    cfg.maxBatches = 50;
    cfg.learningRate = 1e12; // guaranteed blow-up after a couple of steps
    const result = trainAndLog(train, valid, cfg);
    expect(result.diverged).not.toBeNull();
    expect(result.diverged!.atBatch).toBeLessThanOrEqual(50);
    expect(result.diverged!.lastCheckpointBatch).toBeLessThan(result.diverged!.atBatch);
    // restored weights must still produce finite probabilities
    if (result.diverged!.lastCheckpointBatch > 0) {
      const probs = result.model.logProbsAfter([result.vocab.bosId]);
      expect(Number.isFinite(probs[4])).toBe(true);
    }
    result.model.dispose();
  });

  it("rejects empty corpora", () => {
    expect(() => trainAndLog([], [["a"]], tinyTrainerConfig())).toThrow(/non-empty/);
  });
});
