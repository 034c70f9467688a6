/**
 * Subprocess bridge to the link simulator's `sim` CLI. The trainer talks
 * to the simulator exclusively through this interface (tensor files in,
 * tensor files out).
 */
import { spawnSync } from 'child_process';
function run(args) {
    const proc = spawnSync('sim', args, { encoding: 'utf8' });
    if (proc.error) {
        throw new Error(`failed to spawn 'sim' (is the simulator installed?): ${proc.error.message}`);
    }
    if (proc.status !== 0) {
        throw new Error(`sim ${args.join(' ')} exited ${proc.status}: ${proc.stderr || proc.stdout}`);
    }
}
export function simGenDataset(linkConfig, count, outPath, sidebandPath) {
    const args = ['gen-dataset', '--config', linkConfig, '--count', String(count), '--out', outPath];
    if (sidebandPath)
        args.push('--sideband', sidebandPath);
    run(args);
}
export function simTransmit(linkConfig, inPath, outPath, opts = {}) {
    const args = ['transmit', '--config', linkConfig, '--in', inPath, '--out', outPath];
    if (opts.snrDb !== undefined)
        args.push('--snr', String(opts.snrDb));
    if (opts.speedKmh !== undefined)
        args.push('--speed', String(opts.speedKmh));
    if (opts.csiOut)
        args.push('--csi-out', opts.csiOut);
    if (opts.sigma2Out)
        args.push('--sigma2-out', opts.sigma2Out);
    if (opts.predictorPath)
        args.push('--predictor', opts.predictorPath);
    if (opts.denoise === false)
        args.push('--no-denoise');
    run(args);
}
export function simDenoise(inPath, csiPath, sigma2, predictorPath, outPath) {
    run([
        'denoise',
        '--in', inPath,
        '--csi', csiPath,
        '--sigma2', String(sigma2),
        '--predictor', predictorPath,
        '--out', outPath,
    ]);
}
