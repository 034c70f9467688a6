/**
 * Procedural 32x32x3 image generator.
 *
 * The sandbox has no dataset downloads, so training and evaluation run on
 * synthetic natural-ish images: smooth color gradients with a few soft
 * rectangles and disks. Deterministic per seed.
 */
import { Rng } from './rng.js';
export const IMG = 32;
export const CHANNELS = 3;
export const IMG_PIXELS = IMG * IMG * CHANNELS;
function clamp01(v) {
    return v < 0 ? 0 : v > 1 ? 1 : v;
}
/** One image as a flat row-major (32, 32, 3) array in [0, 1]. */
export function makeImage(rng) {
    const img = new Float64Array(IMG_PIXELS);
    // background gradient
    const gx = rng.uniform(-1, 1);
    const gy = rng.uniform(-1, 1);
    const base = [rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85)];
    const amp = rng.uniform(0.1, 0.35);
    for (let y = 0; y < IMG; y++) {
        for (let x = 0; x < IMG; x++) {
            const g = amp * ((gx * x + gy * y) / IMG);
            for (let c = 0; c < CHANNELS; c++) {
                img[(y * IMG + x) * CHANNELS + c] = base[c] + g;
            }
        }
    }
    // soft rectangles
    const nRect = rng.int(1, 4);
    for (let r = 0; r < nRect; r++) {
        const x0 = rng.int(0, IMG - 8);
        const y0 = rng.int(0, IMG - 8);
        const w = rng.int(6, Math.min(20, IMG - x0));
        const h = rng.int(6, Math.min(20, IMG - y0));
        const col = [rng.next(), rng.next(), rng.next()];
        const alpha = rng.uniform(0.5, 0.9);
        for (let y = y0; y < y0 + h; y++) {
            for (let x = x0; x < x0 + w; x++) {
                for (let c = 0; c < CHANNELS; c++) {
                    const i = (y * IMG + x) * CHANNELS + c;
                    img[i] = (1 - alpha) * img[i] + alpha * col[c];
                }
            }
        }
    }
    // soft disks
    const nDisk = rng.int(1, 3);
    for (let d = 0; d < nDisk; d++) {
        const cx = rng.uniform(4, IMG - 4);
        const cy = rng.uniform(4, IMG - 4);
        const rad = rng.uniform(3, 8);
        const col = [rng.next(), rng.next(), rng.next()];
        for (let y = 0; y < IMG; y++) {
            for (let x = 0; x < IMG; x++) {
                const dist = Math.hypot(x - cx, y - cy);
                if (dist < rad) {
                    const alpha = 0.8 * (1 - dist / rad);
                    for (let c = 0; c < CHANNELS; c++) {
                        const i = (y * IMG + x) * CHANNELS + c;
                        img[i] = (1 - alpha) * img[i] + alpha * col[c];
                    }
                }
            }
        }
    }
    for (let i = 0; i < IMG_PIXELS; i++)
        img[i] = clamp01(img[i]);
    return img;
}
/** A batch of images as a rank-4 tensor (n, 32, 32, 3). */
export function makeImages(n, seed) {
    const rng = new Rng(seed);
    const data = new Float64Array(n * IMG_PIXELS);
    for (let i = 0; i < n; i++) {
        data.set(makeImage(rng), i * IMG_PIXELS);
    }
    return { shape: [n, IMG, IMG, CHANNELS], data };
}
export function psnr(ref, test, peak = 1.0) {
    if (ref.length !== test.length)
        throw new Error('psnr: length mismatch');
    let se = 0;
    for (let i = 0; i < ref.length; i++) {
        const d = ref[i] - test[i];
        se += d * d;
    }
    const mse = se / ref.length;
    if (mse === 0)
        return Infinity;
    return 10 * Math.log10((peak * peak) / mse);
}
