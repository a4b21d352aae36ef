import { Readable, Writable } from "node:stream";

import { TransformerLM } from "./model.js";
import { Vocabulary } from "./tokenizer.js";

/** Newline-delimited JSON scorer protocol, server side.

    Hello first, then one result/error line per score request. Log
    probabilities are natural log. Per-request failures never abort the
    session; undecodable lines yield an id-less protocol error carrying the
    byte offset of the offending line. */

interface ScoreRequest {
  id: number;
  mode: string;
  left: string[];
  target: string;
}

function formatLogProb(value: number): number | string {
  // JSON has no Infinity literal; mirror the client's tolerant float parse.
  return Number.isFinite(value) ? value : "-Infinity";
}

export class ScorerServer {
  constructor(
    private model: TransformerLM,
    private vocab: Vocabulary,
    private scorerId: string,
    private maxBatch = 64,
  ) {}

  helloLine(): string {
    return JSON.stringify({
      type: "hello",
      scorer_id: this.scorerId,
      modes: ["causal"],
      vocab_digest: this.vocab.digest(),
      max_batch: this.maxBatch,
    });
  }

  answer(request: ScoreRequest): string {
    if (request.mode !== "causal") {
      return JSON.stringify({
        type: "error",
        id: request.id,
        code: "scorer",
        message: `mode ${request.mode} is not supported by this backend`,
      });
    }
    if (!this.vocab.has(request.target)) {
      return JSON.stringify({
        type: "error",
        id: request.id,
        code: "oov",
        message: `target token '${request.target}' is not in the scorer's vocabulary`,
      });
    }
    const prefix = [this.vocab.bosId, ...this.vocab.encode(request.left)];
    const logProbs = this.model.logProbsAfter(prefix);
    return JSON.stringify({
      type: "result",
      id: request.id,
      log_prob: formatLogProb(logProbs[this.vocab.id(request.target)]),
    });
  }

  handleLine(line: Buffer, offset: number): string {
    let data: any;
    try {
      data = JSON.parse(line.toString("utf-8"));
    } catch (err) {
      return JSON.stringify({
        type: "error",
        id: null,
        code: "protocol",
        message: `malformed protocol line: ${(err as Error).message}`,
        offset,
      });
    }
    const kind = data.type ?? (data.target !== undefined ? "score" : undefined);
    if (kind !== "score" || typeof data.id !== "number" || typeof data.target !== "string") {
      return JSON.stringify({
        type: "error",
        id: typeof data.id === "number" ? data.id : null,
        code: "protocol",
        message: `expected a score message, got ${JSON.stringify(kind)}`,
        offset,
      });
    }
    return this.answer({
      id: data.id,
      mode: data.mode ?? "causal",
      left: Array.isArray(data.left) ? data.left.map(String) : [],
      target: data.target,
    });
  }

  /** Serve until the input stream ends. */
  run(input: Readable, output: Writable): Promise<void> {
    output.write(this.helloLine() + "\n");
    let pending = Buffer.alloc(0);
    let offset = 0;
    return new Promise((resolve, reject) => {
      input.on("data", (chunk: Buffer) => {
        pending = Buffer.concat([pending, chunk]);
        let nl: number;
        while ((nl = pending.indexOf(0x0a)) >= 0) {
          const line = pending.subarray(0, nl);
          const lineOffset = offset;
          offset += nl + 1;
          pending = pending.subarray(nl + 1);
          if (line.toString("utf-8").trim().length > 0) {
            output.write(this.handleLine(line, lineOffset) + "\n");
          }
        }
      });
      input.on("end", () => resolve());
      input.on("error", reject);
    });
  }
}
