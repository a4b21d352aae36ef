/** Synthetic corpora with enough word-order structure that a tiny model can
    visibly learn within a few hundred batches. */

const SUBJECTS = ["birds", "dogs", "foxes", "crows", "mice", "cats", "owls", "bees"];
const VERBS = ["chase", "watch", "follow", "avoid", "find", "see"];
const OBJECTS = ["cars", "kites", "shadows", "trains", "rivers", "stones"];
const TAILS = ["quietly.", "quickly.", "today.", "slowly."];

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function syntheticSentence(rand: () => number): string[] {
  const pick = (arr: string[]) => arr[Math.floor(rand() * arr.length)];
  return [pick(SUBJECTS), pick(VERBS), "the", pick(OBJECTS), pick(TAILS)];
}

export function syntheticCorpus(nSentences: number, seed = 1): string[][] {
  const rand = mulberry32(seed);
  return Array.from({ length: nSentences }, () => syntheticSentence(rand));
}

export function tokenCount(corpus: string[][]): number {
  return corpus.reduce((n, s) => n + s.length, 0);
}
