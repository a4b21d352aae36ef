import * as tf from "@tensorflow/tfjs";

export interface ModelConfig {
  vocabSize: number;
  blockSize: number;
  layers: number;
  hidden: number;
  heads: number;
  dropout: number;
  seed: number;
}

/** Decoder-only transformer language model over word ids.

    Built from raw ops with an explicit variable map so checkpoints are a
    plain name-to-array dictionary. The forward pass is standard pre-norm:
    token+position embeddings, per-block causal self-attention and a ReLU
    MLP with residual connections, a final layer norm, and an output
    projection to vocabulary logits. */
export class TransformerLM {
  private static instances = 0;

  readonly cfg: ModelConfig;
  readonly vars: Record<string, tf.Variable> = {};
  private masks = new Map<number, tf.Tensor>();
  // tfjs registers variables engine-wide by name; namespace per instance so
  // several models can coexist. Checkpoint keys stay the logical names.
  private readonly ns = `lm${TransformerLM.instances++}`;

  constructor(cfg: ModelConfig, weights?: Record<string, tf.Tensor>) {
    this.cfg = cfg;
    if (cfg.hidden % cfg.heads !== 0) {
      throw new Error(`hidden (${cfg.hidden}) must divide evenly by heads (${cfg.heads})`);
    }
    let seed = cfg.seed;
    const init = (name: string, shape: number[], std: number) => {
      const value = weights
        ? weights[name]
        : std === 0
          ? tf.zeros(shape)
          : tf.randomNormal(shape, 0, std, "float32", seed++);
      if (value === undefined) throw new Error(`checkpoint is missing weight ${name}`);
      if (value.shape.join(",") !== shape.join(",")) {
        throw new Error(`weight ${name} has shape ${value.shape}, expected ${shape}`);
      }
      this.vars[name] = tf.variable(value as tf.Tensor, true, `${this.ns}/${name}`);
    };
    const d = cfg.hidden;
    init("tok_emb", [cfg.vocabSize, d], 0.02);
    init("pos_emb", [cfg.blockSize, d], 0.02);
    for (let i = 0; i < cfg.layers; i++) {
      const p = `blk${i}.`;
      init(p + "ln1.g", [d], 0);
      init(p + "ln1.b", [d], 0);
      init(p + "attn.wqkv", [d, 3 * d], 0.02);
      init(p + "attn.bqkv", [3 * d], 0);
      init(p + "attn.wo", [d, d], 0.02);
      init(p + "attn.bo", [d], 0);
      init(p + "ln2.g", [d], 0);
      init(p + "ln2.b", [d], 0);
      init(p + "mlp.w1", [d, 4 * d], 0.02);
      init(p + "mlp.b1", [4 * d], 0);
      init(p + "mlp.w2", [4 * d, d], 0.02);
      init(p + "mlp.b2", [d], 0);
    }
    init("lnf.g", [d], 0);
    init("lnf.b", [d], 0);
    init("out.w", [d, cfg.vocabSize], 0.02);
    init("out.b", [cfg.vocabSize], 0);
  }

  private layerNorm(x: tf.Tensor, gain: tf.Tensor, bias: tf.Tensor): tf.Tensor {
    const { mean, variance } = tf.moments(x, -1, true);
    // gains are stored as offsets from 1 so fresh checkpoints start at identity
    return x.sub(mean).div(tf.sqrt(variance.add(1e-5))).mul(gain.add(1)).add(bias);
  }

  private causalMask(t: number): tf.Tensor {
    let mask = this.masks.get(t);
    if (!mask) {
      const lower = tf.linalg.bandPart(tf.ones([t, t]), -1, 0);
      mask = tf.keep(lower.sub(1).mul(1e9)); // 0 on/below diagonal, -1e9 above
      this.masks.set(t, mask);
    }
    return mask;
  }

  /** Logits [batch, time, vocab] for int32 inputs [batch, time]. */
  forward(inputs: tf.Tensor, training: boolean): tf.Tensor {
    const cfg = this.cfg;
    const [b, t] = inputs.shape as [number, number];
    if (t > cfg.blockSize) {
      throw new Error(`sequence length ${t} exceeds block size ${cfg.blockSize}`);
    }
    const dh = cfg.hidden / cfg.heads;
    const drop = (x: tf.Tensor) =>
      training && cfg.dropout > 0 ? tf.dropout(x, cfg.dropout) : x;

    let h = tf
      .gather(this.vars["tok_emb"], inputs)
      .add(tf.slice(this.vars["pos_emb"], [0, 0], [t, -1]));
    h = drop(h);

    for (let i = 0; i < cfg.layers; i++) {
      const p = `blk${i}.`;
      const normed = this.layerNorm(h, this.vars[p + "ln1.g"], this.vars[p + "ln1.b"]);
      const qkv = tf
        .matMul(normed.reshape([b * t, cfg.hidden]), this.vars[p + "attn.wqkv"])
        .add(this.vars[p + "attn.bqkv"])
        .reshape([b, t, 3, cfg.heads, dh])
        .transpose([2, 0, 3, 1, 4]); // [3, b, heads, t, dh]
      const [q, k, v] = tf.unstack(qkv, 0);
      let scores = tf.matMul(q, k, false, true).mul(1 / Math.sqrt(dh));
      scores = scores.add(this.causalMask(t));
      const att = drop(tf.softmax(scores, -1));
      const ctx = tf
        .matMul(att, v) // [b, heads, t, dh]
        .transpose([0, 2, 1, 3])
        .reshape([b * t, cfg.hidden]);
      const attnOut = drop(
        tf.matMul(ctx, this.vars[p + "attn.wo"]).add(this.vars[p + "attn.bo"]),
      ).reshape([b, t, cfg.hidden]);
      h = h.add(attnOut);

      const normed2 = this.layerNorm(h, this.vars[p + "ln2.g"], this.vars[p + "ln2.b"]);
      const mlp = drop(
        tf
          .matMul(
            tf
              .matMul(normed2.reshape([b * t, cfg.hidden]), this.vars[p + "mlp.w1"])
              .add(this.vars[p + "mlp.b1"])
              .relu(),
            this.vars[p + "mlp.w2"],
          )
          .add(this.vars[p + "mlp.b2"]),
      ).reshape([b, t, cfg.hidden]);
      h = h.add(mlp);
    }

    const final = this.layerNorm(h, this.vars["lnf.g"], this.vars["lnf.b"]);
    return tf
      .matMul(final.reshape([b * t, cfg.hidden]), this.vars["out.w"])
      .add(this.vars["out.b"])
      .reshape([b, t, cfg.vocabSize]);
  }

  /** Mean masked cross-entropy in nats. */
  loss(inputs: tf.Tensor, targets: tf.Tensor, mask: tf.Tensor, training: boolean): tf.Scalar {
    const logits = this.forward(inputs, training);
    const logProbs = tf.logSoftmax(logits, -1);
    const picked = tf
      .oneHot(targets as tf.Tensor2D, this.cfg.vocabSize)
      .mul(logProbs)
      .sum(-1); // [b, t] log-probability of each target
    const nll = picked.mul(mask).sum().neg();
    return nll.div(mask.sum()) as tf.Scalar;
  }

  /** One SGD step with global-norm gradient clipping; returns the batch loss. */
  trainStep(
    inputs: tf.Tensor,
    targets: tf.Tensor,
    mask: tf.Tensor,
    optimizer: tf.Optimizer,
    clip: number,
  ): number {
    const varList = Object.values(this.vars);
    const { value, grads } = tf.variableGrads(
      () => this.loss(inputs, targets, mask, true),
      varList,
    );
    const lossValue = value.dataSync()[0];
    value.dispose();
    tf.tidy(() => {
      const flat = Object.values(grads);
      const norm = tf.sqrt(
        tf.addN(flat.map((g) => g.square().sum())) as tf.Tensor,
      );
      const scale = tf.minimum(tf.scalar(1), tf.scalar(clip).div(norm.add(1e-12)));
      const clipped: Record<string, tf.Tensor> = {};
      for (const [name, grad] of Object.entries(grads)) {
        clipped[name] = grad.mul(scale);
      }
      optimizer.applyGradients(clipped);
    });
    Object.values(grads).forEach((g) => g.dispose());
    return lossValue;
  }

  /** Total NLL (nats) and target count over a masked batch, dropout off. */
  evalNll(inputs: tf.Tensor, targets: tf.Tensor, mask: tf.Tensor): { nll: number; count: number } {
    return tf.tidy(() => {
      const logProbs = tf.logSoftmax(this.forward(inputs, false), -1);
      const picked = tf
        .oneHot(targets as tf.Tensor2D, this.cfg.vocabSize)
        .mul(logProbs)
        .sum(-1);
      const nll = picked.mul(mask).sum().neg().dataSync()[0];
      const count = mask.sum().dataSync()[0];
      return { nll, count };
    });
  }

  /** Natural-log next-token distribution after a prefix of ids. */
  logProbsAfter(prefixIds: number[]): Float32Array {
    if (prefixIds.length === 0) throw new Error("prefix must not be empty");
    const window = prefixIds.slice(-this.cfg.blockSize);
    return tf.tidy(() => {
      const input = tf.tensor2d([window], [1, window.length], "int32");
      const logits = this.forward(input, false);
      const last = logits.slice([0, window.length - 1, 0], [1, 1, this.cfg.vocabSize]);
      return tf.logSoftmax(last.reshape([this.cfg.vocabSize])).dataSync() as Float32Array;
    });
  }

  /** Snapshot of all weights as plain arrays (for checkpoints). */
  weightArrays(): Record<string, { shape: number[]; values: Float32Array }> {
    const out: Record<string, { shape: number[]; values: Float32Array }> = {};
    for (const [name, variable] of Object.entries(this.vars)) {
      out[name] = {
        shape: variable.shape.slice(),
        values: variable.dataSync() as Float32Array,
      };
    }
    return out;
  }

  dispose(): void {
    Object.values(this.vars).forEach((v) => v.dispose());
    this.masks.forEach((m) => m.dispose());
    this.masks.clear();
  }
}
