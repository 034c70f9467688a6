/** Small deterministic PRNG (mulberry32) with a Gaussian variate. */
export class Rng {
    state;
    spare = null;
    constructor(seed) {
        this.state = seed >>> 0;
    }
    next() {
        this.state = (this.state + 0x6d2b79f5) >>> 0;
        let t = this.state;
        t = Math.imul(t ^ (t >>> 15), t | 1);
        t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
        return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    }
    uniform(lo = 0, hi = 1) {
        return lo + (hi - lo) * this.next();
    }
    int(lo, hi) {
        return lo + Math.floor(this.next() * (hi - lo));
    }
    gauss() {
        if (this.spare !== null) {
            const v = this.spare;
            this.spare = null;
            return v;
        }
        let u = 0;
        let v = 0;
        while (u === 0)
            u = this.next();
        v = this.next();
        const mag = Math.sqrt(-2.0 * Math.log(u));
        this.spare = mag * Math.sin(2 * Math.PI * v);
        return mag * Math.cos(2 * Math.PI * v);
    }
}
