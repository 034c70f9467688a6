/**
 * Stage 3: decoder fine-tune against the live link.
 *
 * Encoder and noise predictor stay frozen; latents go through the
 * simulator (transmit at the training SNR/speed, denoised with the
 * trained predictor), and only the decoder learns to reconstruct the
 * original images from what actually arrives. The channel acts as a
 * fixed stochastic corruption: no gradient flows through it.
 */

import * as path from 'path';
import { tf } from './backend.js';
import type { Tensor2D } from '@tensorflow/tfjs';
import { AutoencoderPair, encodeLatents, weightsHash } from './autoencoder.js';
import { TrainConfig } from './config.js';
import { IMG_PIXELS, psnr } from './images.js';
import { simTransmit } from './simbridge.js';
import { Tensor, readTensor, writeTensor } from './tensorfile.js';

export interface FinetuneResult {
  psnrBefore: number;
  psnrAfter: number;
  encoderHashBefore: string;
  encoderHashAfter: string;
}

/**
 * Fine-tune the decoder in place. ``workDir`` holds the tensor files
 * exchanged with the simulator; ``predictorPath`` points at the stage-2
 * weights (omit it to adapt the decoder to the raw, un-denoised link,
 * which is the ablation arm).
 */
export function finetuneDecoder(
  pair: AutoencoderPair,
  images: Tensor,
  cfg: TrainConfig,
  workDir: string,
  predictorPath?: string
): FinetuneResult {
  const encoderHashBefore = weightsHash(pair.encoder);
  const latents = encodeLatents(pair, images);
  const zPath = path.join(workDir, 'finetune_z0.tns');
  const rxPath = path.join(workDir, 'finetune_rx.tns');
  writeTensor(zPath, latents);
  simTransmit(cfg.linkConfigPath, zPath, rxPath, {
    snrDb: cfg.snrDb,
    speedKmh: cfg.speedKmh,
    predictorPath,
    denoise: predictorPath !== undefined,
  });
  const rx = readTensor(rxPath);

  const n = images.shape[0];
  const holdout = Math.max(1, Math.floor(n / 5));
  const nTrain = n - holdout;
  const d = latents.shape[1];
  const xAll = tf.tensor2d(Float32Array.from(rx.data), [n, d]);
  const yAll = tf.tensor2d(Float32Array.from(images.data), [n, IMG_PIXELS]);

  const evalPsnr = (): number => {
    const zv = xAll.slice([nTrain, 0], [holdout, d]);
    const reconV = pair.decoder.predict(zv) as Tensor2D;
    const value = psnr(
      images.data.subarray(nTrain * IMG_PIXELS),
      Float64Array.from(reconV.dataSync())
    );
    zv.dispose();
    reconV.dispose();
    return value;
  };

  const psnrBefore = evalPsnr();
  const opt = tf.train.adam(cfg.lr);
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    for (let start = 0; start < nTrain; start += cfg.batchSize) {
      const size = Math.min(cfg.batchSize, nTrain - start);
      const bx = xAll.slice([start, 0], [size, d]);
      const by = yAll.slice([start, 0], [size, IMG_PIXELS]);
      const loss = opt.minimize(
        () =>
          tf.losses.meanSquaredError(
            by,
            pair.decoder.apply(bx) as Tensor2D
          ) as tf.Scalar,
        true
      )!;
      loss.dispose();
      bx.dispose();
      by.dispose();
    }
  }
  const psnrAfter = evalPsnr();
  xAll.dispose();
  yAll.dispose();
  return {
    psnrBefore,
    psnrAfter,
    encoderHashBefore,
    encoderHashAfter: weightsHash(pair.encoder),
  };
}
