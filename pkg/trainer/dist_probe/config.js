/**
 * Training configuration (TOML).
 *
 *   [train]
 *   lr = 1e-4          # Adam learning rate
 *   batch_size = 32
 *   epochs = 20
 *   latent_dim = 128
 *   snr_db = 13.0      # link SNR during training-time transmissions
 *   speed_kmh = 500.0
 *   seed = 7
 *
 *   [paths]
 *   images = "images.tns"      # rank-4 (n, 32, 32, 3)
 *   dataset = "ds.tns"         # from `sim gen-dataset`
 *   out_dir = "artifacts"
 *   link_config = "link.toml"  # simulator config for transmit/gen-dataset
 */
import * as fs from 'fs';
import * as path from 'path';
import { parse } from 'smol-toml';
export const DEFAULTS = {
    lr: 1e-4,
    batchSize: 32,
    epochs: 20,
    latentDim: 128,
    snrDb: 13.0,
    speedKmh: 500.0,
    seed: 7,
};
function num(v, fallback) {
    if (v === undefined)
        return fallback;
    if (typeof v !== 'number' || !Number.isFinite(v))
        throw new Error(`expected a number, got ${v}`);
    return v;
}
function str(v, fallback) {
    if (v === undefined)
        return fallback;
    if (typeof v !== 'string')
        throw new Error(`expected a string, got ${v}`);
    return v;
}
export function loadConfig(configPath) {
    const doc = parse(fs.readFileSync(configPath, 'utf8'));
    const train = (doc.train ?? {});
    const paths = (doc.paths ?? {});
    const dir = path.dirname(path.resolve(configPath));
    const resolve = (p) => (p === '' ? '' : path.resolve(dir, p));
    const cfg = {
        lr: num(train.lr, DEFAULTS.lr),
        batchSize: num(train.batch_size, DEFAULTS.batchSize),
        epochs: num(train.epochs, DEFAULTS.epochs),
        latentDim: num(train.latent_dim, DEFAULTS.latentDim),
        snrDb: num(train.snr_db, DEFAULTS.snrDb),
        speedKmh: num(train.speed_kmh, DEFAULTS.speedKmh),
        seed: num(train.seed, DEFAULTS.seed),
        imagesPath: resolve(str(paths.images, 'images.tns')),
        datasetPath: resolve(str(paths.dataset, 'ds.tns')),
        outDir: resolve(str(paths.out_dir, 'artifacts')),
        linkConfigPath: resolve(str(paths.link_config, 'link.toml')),
    };
    if (cfg.lr <= 0 || cfg.batchSize < 1 || cfg.epochs < 1 || cfg.latentDim < 1) {
        throw new Error('lr must be > 0; batch_size, epochs, latent_dim must be >= 1');
    }
    return cfg;
}
