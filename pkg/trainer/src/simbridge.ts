/**
 * Subprocess bridge to the link simulator's `sim` CLI. The trainer talks
 * to the simulator exclusively through this interface (tensor files in,
 * tensor files out).
 */

import { spawnSync } from 'child_process';

function run(args: string[]): void {
  const proc = spawnSync('sim', args, { encoding: 'utf8' });
  if (proc.error) {
    throw new Error(`failed to spawn 'sim' (is the simulator installed?): ${proc.error.message}`);
  }
  if (proc.status !== 0) {
    throw new Error(`sim ${args.join(' ')} exited ${proc.status}: ${proc.stderr || proc.stdout}`);
  }
}

export function simGenDataset(
  linkConfig: string,
  count: number,
  outPath: string,
  sidebandPath?: string
): void {
  const args = ['gen-dataset', '--config', linkConfig, '--count', String(count), '--out', outPath];
  if (sidebandPath) args.push('--sideband', sidebandPath);
  run(args);
}

export interface TransmitOptions {
  snrDb?: number;
  speedKmh?: number;
  predictorPath?: string; // trained weights; omit with denoise=false for the raw link
  denoise?: boolean;
  csiOut?: string;
  sigma2Out?: string;
}

export function simTransmit(
  linkConfig: string,
  inPath: string,
  outPath: string,
  opts: TransmitOptions = {}
): void {
  const args = ['transmit', '--config', linkConfig, '--in', inPath, '--out', outPath];
  if (opts.snrDb !== undefined) args.push('--snr', String(opts.snrDb));
  if (opts.speedKmh !== undefined) args.push('--speed', String(opts.speedKmh));
  if (opts.csiOut) args.push('--csi-out', opts.csiOut);
  if (opts.sigma2Out) args.push('--sigma2-out', opts.sigma2Out);
  if (opts.predictorPath) args.push('--predictor', opts.predictorPath);
  if (opts.denoise === false) args.push('--no-denoise');
  run(args);
}

export function simDenoise(
  inPath: string,
  csiPath: string,
  sigma2: number,
  predictorPath: string,
  outPath: string
): void {
  run([
    'denoise',
    '--in', inPath,
    '--csi', csiPath,
    '--sigma2', String(sigma2),
    '--predictor', predictorPath,
    '--out', outPath,
  ]);
}
