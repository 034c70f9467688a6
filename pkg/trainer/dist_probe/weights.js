/**
 * The predictor weight schema shared with the link simulator, plus a pure
 * TypeScript forward pass used for parity checks and file-level inference.
 *
 * Schema: {"version": 1, "layers": [{"type": "dense", "in": n, "out": m,
 * "w": [m*n floats, row-major], "b": [m floats], "act": "relu"|"identity"}]}
 */
import * as fs from 'fs';
export function validateWeightDoc(doc, label = 'weights') {
    const d = doc;
    if (!d || d.version !== 1 || !Array.isArray(d.layers) || d.layers.length === 0) {
        throw new Error(`${label}: not a version-1 weight document`);
    }
    let prevOut = null;
    for (const [i, layer] of d.layers.entries()) {
        if (layer.type !== 'dense')
            throw new Error(`${label}: layer ${i} type ${layer.type}`);
        if (layer.act !== 'relu' && layer.act !== 'identity') {
            throw new Error(`${label}: layer ${i} activation ${layer.act}`);
        }
        if (layer.w.length !== layer.in * layer.out || layer.b.length !== layer.out) {
            throw new Error(`${label}: layer ${i} carries ${layer.w.length} weights / ` +
                `${layer.b.length} biases for (${layer.out}x${layer.in})`);
        }
        if (prevOut !== null && layer.in !== prevOut) {
            throw new Error(`${label}: layer ${i} input ${layer.in} does not chain with ${prevOut}`);
        }
        prevOut = layer.out;
    }
    return d;
}
export function saveWeights(path, doc) {
    validateWeightDoc(doc);
    fs.writeFileSync(path, JSON.stringify(doc));
}
export function loadWeights(path) {
    return validateWeightDoc(JSON.parse(fs.readFileSync(path, 'utf8')), path);
}
/** Feed-forward in float64, independent of tfjs. */
export function mlpForward(doc, input) {
    let x = input;
    for (const layer of doc.layers) {
        const y = new Float64Array(layer.out);
        if (x.length !== layer.in) {
            throw new Error(`input length ${x.length} != layer input ${layer.in}`);
        }
        for (let i = 0; i < layer.out; i++) {
            let acc = layer.b[i];
            const row = i * layer.in;
            for (let j = 0; j < layer.in; j++)
                acc += layer.w[row + j] * x[j];
            y[i] = layer.act === 'relu' && acc < 0 ? 0 : acc;
        }
        x = y;
    }
    return x;
}
/**
 * Extract a dense-only tf.Sequential into the weight schema. tfjs dense
 * kernels are (in, out); the schema stores (out, in) row-major.
 */
export function fromDenseModel(model, acts) {
    const layers = [];
    const weights = model.getWeights();
    if (weights.length !== 2 * acts.length) {
        throw new Error(`model has ${weights.length / 2} dense layers, got ${acts.length} activations`);
    }
    for (let i = 0; i < acts.length; i++) {
        const kernel = weights[2 * i];
        const bias = weights[2 * i + 1];
        const [nIn, nOut] = kernel.shape;
        const k = kernel.dataSync();
        const b = bias.dataSync();
        const w = new Array(nIn * nOut);
        for (let o = 0; o < nOut; o++) {
            for (let j = 0; j < nIn; j++)
                w[o * nIn + j] = k[j * nOut + o];
        }
        layers.push({ type: 'dense', in: nIn, out: nOut, w, b: Array.from(b), act: acts[i] });
    }
    return validateWeightDoc({ version: 1, layers });
}
