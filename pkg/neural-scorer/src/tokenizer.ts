import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";

export const PAD = "<pad>";
export const BOS = "<s>";
export const EOS = "</s>";
export const UNK = "<unk>";
const SPECIALS = [PAD, BOS, EOS, UNK];

/** Whitespace-token vocabulary with fixed special ids. */
export class Vocabulary {
  readonly tokens: string[];
  readonly index: Map<string, number>;

  constructor(tokens: string[]) {
    this.tokens = tokens;
    this.index = new Map(tokens.map((t, i) => [t, i]));
    for (const [i, special] of SPECIALS.entries()) {
      if (this.tokens[i] !== special) {
        throw new Error(`vocabulary must start with ${SPECIALS.join(" ")}`);
      }
    }
  }

  static fromSentences(sentences: string[][]): Vocabulary {
    const tokens = [...SPECIALS];
    const seen = new Set(tokens);
    for (const sentence of sentences) {
      for (const token of sentence) {
        if (!seen.has(token)) {
          seen.add(token);
          tokens.push(token);
        }
      }
    }
    return new Vocabulary(tokens);
  }

  get size(): number {
    return this.tokens.length;
  }

  get padId(): number {
    return 0;
  }
  get bosId(): number {
    return 1;
  }
  get eosId(): number {
    return 2;
  }
  get unkId(): number {
    return 3;
  }

  /** True for scoreable surface tokens; specials are never valid targets. */
  has(token: string): boolean {
    return this.index.has(token) && !SPECIALS.includes(token);
  }

  id(token: string): number {
    return this.index.get(token) ?? this.unkId;
  }

  encode(tokens: readonly string[]): number[] {
    return tokens.map((t) => this.id(t));
  }

  /** sha256 over the sorted vocabulary, one token per line. */
  digest(): string {
    const hash = createHash("sha256");
    for (const token of [...this.tokens].sort()) {
      hash.update(token, "utf-8");
      hash.update("\n");
    }
    return `sha256:${hash.digest("hex")}`;
  }
}

/** Line-per-sentence whitespace-tokenized corpus; blank lines skipped. */
export function readCorpus(path: string): string[][] {
  const out: string[][] = [];
  for (const line of readFileSync(path, "utf-8").split("\n")) {
    const tokens = line.split(/\s+/).filter((t) => t.length > 0);
    if (tokens.length > 0) out.push(tokens);
  }
  return out;
}
