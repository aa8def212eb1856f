/** Minimal DSP: radix-2 FFT, STFT magnitudes, HTK mel filterbank, onsets. */

/** In-place iterative radix-2 complex FFT (n must be a power of two). */
export function fft(re: Float64Array, im: Float64Array): void {
  const n = re.length;
  if ((n & (n - 1)) !== 0) throw new Error(`FFT size ${n} is not a power of two`);
  for (let i = 1, j = 0; i < n; i++) {
    let bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      [re[i], re[j]] = [re[j], re[i]];
      [im[i], im[j]] = [im[j], im[i]];
    }
  }
  for (let len = 2; len <= n; len <<= 1) {
    const angle = (-2 * Math.PI) / len;
    const wRe = Math.cos(angle);
    const wIm = Math.sin(angle);
    for (let start = 0; start < n; start += len) {
      let curRe = 1;
      let curIm = 0;
      for (let k = 0; k < len / 2; k++) {
        const evenRe = re[start + k];
        const evenIm = im[start + k];
        const oddRe = re[start + k + len / 2] * curRe - im[start + k + len / 2] * curIm;
        const oddIm = re[start + k + len / 2] * curIm + im[start + k + len / 2] * curRe;
        re[start + k] = evenRe + oddRe;
        im[start + k] = evenIm + oddIm;
        re[start + k + len / 2] = evenRe - oddRe;
        im[start + k + len / 2] = evenIm - oddIm;
        const nextRe = curRe * wRe - curIm * wIm;
        curIm = curRe * wIm + curIm * wRe;
        curRe = nextRe;
      }
    }
  }
}

/** Magnitude STFT with a periodic Hann window; frame t starts at t * hop. */
export function stftMagnitude(
  samples: Float64Array,
  nFft: number,
  hop: number
): { frames: Float64Array[]; bins: number } {
  const bins = nFft / 2 + 1;
  const window = new Float64Array(nFft);
  for (let i = 0; i < nFft; i++) {
    window[i] = 0.5 - 0.5 * Math.cos((2 * Math.PI * i) / nFft);
  }
  const frames: Float64Array[] = [];
  for (let start = 0; start + nFft <= samples.length; start += hop) {
    const re = new Float64Array(nFft);
    const im = new Float64Array(nFft);
    for (let i = 0; i < nFft; i++) re[i] = samples[start + i] * window[i];
    fft(re, im);
    const mag = new Float64Array(bins);
    for (let k = 0; k < bins; k++) mag[k] = Math.hypot(re[k], im[k]);
    frames.push(mag);
  }
  return { frames, bins };
}

const hzToMel = (hz: number) => 2595 * Math.log10(1 + hz / 700);
const melToHz = (mel: number) => 700 * (10 ** (mel / 2595) - 1);

/** Triangular HTK-style filterbank (peak 1) from 0 Hz to Nyquist. */
export function melFilterbank(sampleRate: number, nFft: number, nMels: number): Float64Array[] {
  const bins = nFft / 2 + 1;
  const maxMel = hzToMel(sampleRate / 2);
  const points: number[] = [];
  for (let i = 0; i < nMels + 2; i++) points.push(melToHz((maxMel * i) / (nMels + 1)));

  const bank: Float64Array[] = [];
  for (let m = 0; m < nMels; m++) {
    const [left, center, right] = [points[m], points[m + 1], points[m + 2]];
    const filt = new Float64Array(bins);
    for (let k = 0; k < bins; k++) {
      const freq = (k * sampleRate) / nFft;
      const rising = (freq - left) / (center - left);
      const falling = (right - freq) / (right - center);
      filt[k] = Math.max(0, Math.min(rising, falling));
    }
    bank.push(filt);
  }
  return bank;
}

/** log(1 + mel energy) frames for a chunk of audio. */
export function logMelFrames(
  samples: Float64Array,
  sampleRate: number,
  nFft = 2048,
  hop = 512,
  nMels = 80
): Float64Array[] {
  if (samples.length < nFft) {
    // short chunks are zero-padded to one frame so every bar yields output
    const padded = new Float64Array(nFft);
    padded.set(samples);
    samples = padded;
  }
  const { frames } = stftMagnitude(samples, nFft, hop);
  const bank = melFilterbank(sampleRate, nFft, nMels);
  return frames.map((mag) => {
    const out = new Float64Array(nMels);
    for (let m = 0; m < nMels; m++) {
      let acc = 0;
      const filt = bank[m];
      for (let k = 0; k < mag.length; k++) acc += filt[k] * mag[k];
      out[m] = Math.log1p(acc);
    }
    return out;
  });
}

/** Half-wave-rectified spectral flux onset envelope. */
export function onsetEnvelope(
  samples: Float64Array,
  sampleRate: number,
  nFft = 1024,
  hop = 512
): { envelope: Float64Array; hopSeconds: number } {
  const { frames } = stftMagnitude(samples, nFft, hop);
  const envelope = new Float64Array(frames.length);
  for (let t = 1; t < frames.length; t++) {
    let flux = 0;
    for (let k = 0; k < frames[t].length; k++) {
      const diff = frames[t][k] - frames[t - 1][k];
      if (diff > 0) flux += diff;
    }
    envelope[t] = flux;
  }
  return { envelope, hopSeconds: hop / sampleRate };
}
