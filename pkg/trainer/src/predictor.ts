/**
 * Noise-prediction MLP: learns eps from (z_t, h_r, t/T) tuples produced
 * by the simulator's dataset generator, and exports to the shared weight
 * schema so the link can run it at inference time.
 */

import { tf } from './backend.js';
import type { Sequential, Tensor2D } from '@tensorflow/tfjs';
import { Tensor, readTensor } from './tensorfile.js';
import { TrainConfig } from './config.js';
import { WeightDoc, fromDenseModel } from './weights.js';

export interface PredictorDataset {
  features: Tensor; // (n, 2d+1): z_t | h_r | t/T
  targets: Tensor;  // (n, d): eps
  latentDim: number;
}

/** Split a gen-dataset tensor (rows: z_t | h_r | t/T | eps) into X/y. */
export function splitDataset(raw: Tensor): PredictorDataset {
  if (raw.shape.length !== 2 || (raw.shape[1] - 1) % 3 !== 0) {
    throw new Error(`dataset must be (n, 3d+1), got [${raw.shape}]`);
  }
  const n = raw.shape[0];
  const d = (raw.shape[1] - 1) / 3;
  const width = raw.shape[1];
  const features = new Float64Array(n * (2 * d + 1));
  const targets = new Float64Array(n * d);
  for (let i = 0; i < n; i++) {
    const row = raw.data.subarray(i * width, (i + 1) * width);
    features.set(row.subarray(0, 2 * d + 1), i * (2 * d + 1));
    targets.set(row.subarray(2 * d + 1), i * d);
  }
  return {
    features: { shape: [n, 2 * d + 1], data: features },
    targets: { shape: [n, d], data: targets },
    latentDim: d,
  };
}

export function loadDataset(path: string): PredictorDataset {
  return splitDataset(readTensor(path));
}

const HIDDEN = [256, 256];

export function buildPredictor(latentDim: number): { model: Sequential; acts: ('relu' | 'identity')[] } {
  const model = tf.sequential({
    layers: [
      tf.layers.dense({ inputShape: [2 * latentDim + 1], units: HIDDEN[0], activation: 'relu' }),
      tf.layers.dense({ units: HIDDEN[1], activation: 'relu' }),
      tf.layers.dense({ units: latentDim }),
    ],
  });
  return { model, acts: ['relu', 'relu', 'identity'] };
}

export interface PredictorTraining {
  weights: WeightDoc;
  heldoutLoss: number;     // mean per-component MSE on the held-out split
  zeroLoss: number;        // same metric for the all-zero predictor
  lossHistory: number[];
}

/**
 * Train on 90% of the rows, report held-out loss on the remaining 10%.
 * The zero-predictor baseline is E||eps||^2 per component (about 1 for
 * unit Gaussian noise); anything learned must beat it.
 */
export function trainPredictor(ds: PredictorDataset, cfg: TrainConfig): PredictorTraining {
  const n = ds.features.shape[0];
  const hold = Math.max(1, Math.floor(n / 10));
  const nTrain = n - hold;
  const fw = ds.features.shape[1];
  const d = ds.latentDim;
  const xAll = tf.tensor2d(Float32Array.from(ds.features.data), [n, fw]);
  const yAll = tf.tensor2d(Float32Array.from(ds.targets.data), [n, d]);
  const xTrain = xAll.slice([0, 0], [nTrain, fw]);
  const yTrain = yAll.slice([0, 0], [nTrain, d]);
  const xHold = xAll.slice([nTrain, 0], [hold, fw]);
  const yHold = yAll.slice([nTrain, 0], [hold, d]);

  const { model, acts } = buildPredictor(d);
  const opt = tf.train.adam(cfg.lr);
  const lossHistory: number[] = [];
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    let epochLoss = 0;
    let batches = 0;
    for (let start = 0; start < nTrain; start += cfg.batchSize) {
      const size = Math.min(cfg.batchSize, nTrain - start);
      const bx = xTrain.slice([start, 0], [size, fw]);
      const by = yTrain.slice([start, 0], [size, d]);
      const loss = opt.minimize(
        () => tf.losses.meanSquaredError(by, model.apply(bx) as Tensor2D) as tf.Scalar,
        true
      )!;
      epochLoss += loss.dataSync()[0];
      batches += 1;
      loss.dispose();
      bx.dispose();
      by.dispose();
    }
    lossHistory.push(epochLoss / batches);
  }
  const heldoutLoss = (
    tf.losses.meanSquaredError(yHold, model.predict(xHold) as Tensor2D) as tf.Scalar
  ).dataSync()[0];
  const zeroLoss = (tf.mean(yHold.square()) as tf.Scalar).dataSync()[0];
  const weights = fromDenseModel(model, acts);
  for (const t of [xAll, yAll, xTrain, yTrain, xHold, yHold]) t.dispose();
  return { weights, heldoutLoss, zeroLoss, lossHistory };
}
