/**
 * Toy semantic autoencoder for 32x32x3 images.
 *
 * Dense layers only: the offline wasm backend has no conv training
 * kernels and the pure-JS backend is an order of magnitude too slow for
 * conv backprop, so the encoder flattens the image through one hidden
 * layer into the latent and the decoder mirrors it back. Loss is pixel
 * MSE plus a weak KL pull of the latent batch toward a standard normal
 * (weight 1e-4), which keeps latent scales link-friendly.
 */

import * as fs from 'fs';
import { tf } from './backend.js';
import type { Sequential, Tensor2D } from '@tensorflow/tfjs';
import { IMG_PIXELS } from './images.js';
import { Tensor } from './tensorfile.js';
import { TrainConfig } from './config.js';

const HIDDEN = 384;
export const KL_WEIGHT = 1e-4;

export interface AutoencoderPair {
  encoder: Sequential;
  decoder: Sequential;
}

export function buildAutoencoder(latentDim: number): AutoencoderPair {
  const encoder = tf.sequential({
    layers: [
      tf.layers.dense({ inputShape: [IMG_PIXELS], units: HIDDEN, activation: 'relu' }),
      tf.layers.dense({ units: latentDim }),
    ],
  });
  const decoder = tf.sequential({
    layers: [
      tf.layers.dense({ inputShape: [latentDim], units: HIDDEN, activation: 'relu' }),
      tf.layers.dense({ units: IMG_PIXELS, activation: 'sigmoid' }),
    ],
  });
  return { encoder, decoder };
}

function toMatrix(images: Tensor): Tensor2D {
  const n = images.shape[0];
  return tf.tensor2d(Float32Array.from(images.data), [n, IMG_PIXELS]);
}

/** MSE + KL(batch latent moments || N(0, 1)). */
function aeLoss(x: Tensor2D, pair: AutoencoderPair): tf.Scalar {
  const z = pair.encoder.apply(x) as Tensor2D;
  const recon = pair.decoder.apply(z) as Tensor2D;
  const mse = tf.losses.meanSquaredError(x, recon) as tf.Scalar;
  const { mean, variance } = tf.moments(z, 0);
  const kl = tf
    .mean(
      mean.square().add(variance).sub(1).sub(variance.add(1e-6).log())
    )
    .mul(0.5) as tf.Scalar;
  return mse.add(kl.mul(KL_WEIGHT)) as tf.Scalar;
}

export interface TrainResult {
  lossHistory: number[]; // per-epoch mean loss
}

export function trainAutoencoder(
  images: Tensor,
  cfg: TrainConfig,
  pair?: AutoencoderPair
): { pair: AutoencoderPair; result: TrainResult } {
  if (images.shape.length !== 4 || images.shape[1] * images.shape[2] * images.shape[3] !== IMG_PIXELS) {
    throw new Error(`expected (n, 32, 32, 3) images, got [${images.shape}]`);
  }
  const ae = pair ?? buildAutoencoder(cfg.latentDim);
  const n = images.shape[0];
  const x = toMatrix(images);
  const opt = tf.train.adam(cfg.lr);
  const lossHistory: number[] = [];
  const order = [...Array(n).keys()];
  let rngState = cfg.seed >>> 0;
  const nextRand = () => {
    // mulberry32, enough to shuffle batches reproducibly
    rngState = (rngState + 0x6d2b79f5) >>> 0;
    let t = rngState;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    for (let i = n - 1; i > 0; i--) {
      const j = Math.floor(nextRand() * (i + 1));
      [order[i], order[j]] = [order[j], order[i]];
    }
    let epochLoss = 0;
    let batches = 0;
    for (let start = 0; start < n; start += cfg.batchSize) {
      const idx = order.slice(start, start + cfg.batchSize);
      const batch = tf.tidy(() => tf.gather(x, idx));
      const loss = opt.minimize(() => aeLoss(batch, ae), true)!;
      epochLoss += loss.dataSync()[0];
      batches += 1;
      loss.dispose();
      batch.dispose();
    }
    lossHistory.push(epochLoss / batches);
  }
  x.dispose();
  return { pair: ae, result: { lossHistory } };
}

/** Encode images into a (n, latentDim) latent tensor. */
export function encodeLatents(pair: AutoencoderPair, images: Tensor): Tensor {
  const x = toMatrix(images);
  const z = pair.encoder.predict(x) as Tensor2D;
  const data = Float64Array.from(z.dataSync());
  const shape = [z.shape[0], z.shape[1]];
  x.dispose();
  z.dispose();
  return { shape, data };
}

/** Decode latent rows back to flat images (n, 3072) in [0, 1]. */
export function decodeLatents(pair: AutoencoderPair, latents: Tensor): Tensor {
  const z = tf.tensor2d(Float32Array.from(latents.data), [latents.shape[0], latents.shape[1]]);
  const recon = pair.decoder.predict(z) as Tensor2D;
  const out: Tensor = {
    shape: [recon.shape[0], recon.shape[1]],
    data: Float64Array.from(recon.dataSync()),
  };
  z.dispose();
  recon.dispose();
  return out;
}

interface SavedModel {
  version: 1;
  kind: 'encoder' | 'decoder';
  latentDim: number;
  hidden: number;
  weights: { shape: number[]; data: number[] }[];
}

export function saveModel(path: string, model: Sequential, kind: 'encoder' | 'decoder', latentDim: number): void {
  const weights = model.getWeights().map((w) => ({
    shape: w.shape.slice(),
    data: Array.from(w.dataSync()),
  }));
  const doc: SavedModel = { version: 1, kind, latentDim, hidden: HIDDEN, weights };
  fs.writeFileSync(path, JSON.stringify(doc));
}

export function loadModel(path: string): { model: Sequential; kind: string; latentDim: number } {
  const doc = JSON.parse(fs.readFileSync(path, 'utf8')) as SavedModel;
  if (doc.version !== 1 || (doc.kind !== 'encoder' && doc.kind !== 'decoder')) {
    throw new Error(`${path}: not a saved autoencoder half`);
  }
  const pair = buildAutoencoder(doc.latentDim);
  const model = doc.kind === 'encoder' ? pair.encoder : pair.decoder;
  model.setWeights(doc.weights.map((w) => tf.tensor(w.data, w.shape)));
  return { model, kind: doc.kind, latentDim: doc.latentDim };
}

/** Stable content hash of the weights (frozen-stage verification). */
export function weightsHash(model: Sequential): string {
  const parts: string[] = [];
  for (const w of model.getWeights()) {
    const data = w.dataSync();
    let h = 2166136261 >>> 0; // FNV-1a over the f32 bit patterns
    const view = new DataView(new ArrayBuffer(4));
    for (let i = 0; i < data.length; i++) {
      view.setFloat32(0, data[i]);
      for (let b = 0; b < 4; b++) {
        h = (h ^ view.getUint8(b)) >>> 0;
        h = Math.imul(h, 16777619) >>> 0;
      }
    }
    parts.push(h.toString(16));
  }
  return parts.join(':');
}
