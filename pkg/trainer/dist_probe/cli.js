/**
 * Trainer CLI: `train-ae`, `train-eps`, `finetune-dec`, each taking
 * --config train.toml. Artifacts land in the configured out_dir:
 *
 *   encoder.json / decoder.json   stage-1 autoencoder halves
 *   latents.tns                   per-image latents for the simulator
 *   weights.json                  stage-2 noise predictor (shared schema)
 *   decoder_finetuned.json        stage-3 decoder
 */
import * as fs from 'fs';
import * as path from 'path';
import { tfReady } from './backend.js';
import { encodeLatents, loadModel, saveModel, trainAutoencoder, } from './autoencoder.js';
import { loadConfig } from './config.js';
import { finetuneDecoder } from './finetune.js';
import { loadDataset, trainPredictor } from './predictor.js';
import { saveWeights } from './weights.js';
import { readTensor, writeTensor } from './tensorfile.js';
function argValue(args, flag) {
    const i = args.indexOf(flag);
    return i >= 0 ? args[i + 1] : undefined;
}
async function cmdTrainAe(cfgPath) {
    const cfg = loadConfig(cfgPath);
    const images = readTensor(cfg.imagesPath);
    fs.mkdirSync(cfg.outDir, { recursive: true });
    const { pair, result } = trainAutoencoder(images, cfg);
    saveModel(path.join(cfg.outDir, 'encoder.json'), pair.encoder, 'encoder', cfg.latentDim);
    saveModel(path.join(cfg.outDir, 'decoder.json'), pair.decoder, 'decoder', cfg.latentDim);
    writeTensor(path.join(cfg.outDir, 'latents.tns'), encodeLatents(pair, images));
    const last = result.lossHistory[result.lossHistory.length - 1];
    console.log(`train-ae: ${images.shape[0]} images, ${cfg.epochs} epochs, final loss ${last.toExponential(3)}`);
    return 0;
}
async function cmdTrainEps(cfgPath) {
    const cfg = loadConfig(cfgPath);
    fs.mkdirSync(cfg.outDir, { recursive: true });
    const ds = loadDataset(cfg.datasetPath);
    const out = trainPredictor(ds, cfg);
    saveWeights(path.join(cfg.outDir, 'weights.json'), out.weights);
    console.log(`train-eps: held-out loss ${out.heldoutLoss.toFixed(4)} vs zero baseline ${out.zeroLoss.toFixed(4)}`);
    return out.heldoutLoss < out.zeroLoss ? 0 : 2;
}
async function cmdFinetuneDec(cfgPath) {
    const cfg = loadConfig(cfgPath);
    const encoderPath = path.join(cfg.outDir, 'encoder.json');
    const decoderPath = path.join(cfg.outDir, 'decoder.json');
    const predictorPath = path.join(cfg.outDir, 'weights.json');
    for (const p of [encoderPath, decoderPath, predictorPath]) {
        if (!fs.existsSync(p)) {
            console.error(`missing stage artifact: ${p} (run train-ae / train-eps first)`);
            return 2;
        }
    }
    const pair = {
        encoder: loadModel(encoderPath).model,
        decoder: loadModel(decoderPath).model,
    };
    const images = readTensor(cfg.imagesPath);
    const res = finetuneDecoder(pair, images, cfg, cfg.outDir, predictorPath);
    if (res.encoderHashBefore !== res.encoderHashAfter) {
        console.error('encoder changed during decoder fine-tune');
        return 2;
    }
    saveModel(path.join(cfg.outDir, 'decoder_finetuned.json'), pair.decoder, 'decoder', cfg.latentDim);
    console.log(`finetune-dec: validation psnr ${res.psnrBefore.toFixed(2)} -> ${res.psnrAfter.toFixed(2)} dB`);
    return 0;
}
export async function main(argv) {
    const [command, ...rest] = argv;
    const cfgPath = argValue(rest, '--config');
    if (!command || !cfgPath) {
        console.error('usage: (train-ae | train-eps | finetune-dec) --config train.toml');
        return 1;
    }
    try {
        await tfReady();
        if (command === 'train-ae')
            return await cmdTrainAe(cfgPath);
        if (command === 'train-eps')
            return await cmdTrainEps(cfgPath);
        if (command === 'finetune-dec')
            return await cmdFinetuneDec(cfgPath);
        console.error(`unknown command ${command}`);
        return 1;
    }
    catch (err) {
        console.error(`error: ${err instanceof Error ? err.message : err}`);
        return 2;
    }
}
const isMain = process.argv[1] && import.meta.url.endsWith(path.basename(process.argv[1]));
if (isMain) {
    main(process.argv.slice(2)).then((code) => process.exit(code));
}
