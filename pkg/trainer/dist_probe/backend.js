/** One-time tfjs backend setup: wasm when available, else plain cpu. */
import * as tf from '@tensorflow/tfjs';
import { setWasmPaths } from '@tensorflow/tfjs-backend-wasm';
import { createRequire } from 'module';
let ready = null;
export function tfReady() {
    if (!ready) {
        ready = (async () => {
            try {
                const require = createRequire(import.meta.url);
                const wasmFile = require.resolve('@tensorflow/tfjs-backend-wasm/dist/tfjs-backend-wasm.wasm');
                setWasmPaths(wasmFile.replace(/tfjs-backend-wasm\.wasm$/, ''));
                await tf.setBackend('wasm');
            }
            catch {
                await tf.setBackend('cpu');
            }
            await tf.ready();
            return tf.getBackend();
        })();
    }
    return ready;
}
export { tf };
