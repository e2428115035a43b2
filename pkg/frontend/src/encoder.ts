/**
 * Deterministic, weight-free image embedding.
 *
 * Features: a 12x12 mean-pooled RGB grid (centered around mid-gray) plus
 * 16-bin per-channel color histograms (centered around the uniform bin
 * mass), L2-normalized. No model weights are required, which keeps the
 * sidecar hermetic; a learned encoder can be swapped in behind the same
 * interface via SIDECAR_ENCODER.
 */
import { readFileSync } from 'node:fs'
import { PNG } from 'pngjs'

export const GRID = 12
export const BINS = 16
export const DIM = GRID * GRID * 3 + BINS * 3

export interface Pixels {
  width: number
  height: number
  /** RGBA, row-major, 8-bit */
  data: Uint8Array
}

export function decodePng(path: string): Pixels {
  const png = PNG.sync.read(readFileSync(path))
  return { width: png.width, height: png.height, data: new Uint8Array(png.data) }
}

function compositeOnWhite(r: number, g: number, b: number, a: number): [number, number, number] {
  const alpha = a / 255
  return [
    r * alpha + 255 * (1 - alpha),
    g * alpha + 255 * (1 - alpha),
    b * alpha + 255 * (1 - alpha),
  ]
}

export function encodePixels(pixels: Pixels): number[] {
  const { width, height, data } = pixels
  if (width <= 0 || height <= 0) {
    throw new Error('image has no pixels')
  }

  const gridSum = new Float64Array(GRID * GRID * 3)
  const gridCount = new Float64Array(GRID * GRID)
  const histogram = new Float64Array(BINS * 3)
  const total = width * height

  for (let y = 0; y < height; y++) {
    const cellY = Math.min(GRID - 1, Math.floor((y * GRID) / height))
    for (let x = 0; x < width; x++) {
      const cellX = Math.min(GRID - 1, Math.floor((x * GRID) / width))
      const offset = (y * width + x) * 4
      const [r, g, b] = compositeOnWhite(
        data[offset], data[offset + 1], data[offset + 2], data[offset + 3],
      )
      const cell = cellY * GRID + cellX
      gridSum[cell * 3] += r / 255
      gridSum[cell * 3 + 1] += g / 255
      gridSum[cell * 3 + 2] += b / 255
      gridCount[cell] += 1
      histogram[Math.min(BINS - 1, Math.floor((r / 256) * BINS))] += 1
      histogram[BINS + Math.min(BINS - 1, Math.floor((g / 256) * BINS))] += 1
      histogram[2 * BINS + Math.min(BINS - 1, Math.floor((b / 256) * BINS))] += 1
    }
  }

  const features = new Array<number>(DIM)
  for (let cell = 0; cell < GRID * GRID; cell++) {
    const count = gridCount[cell] || 1
    for (let channel = 0; channel < 3; channel++) {
      // center on mid-gray so unrelated content decorrelates
      features[cell * 3 + channel] = gridSum[cell * 3 + channel] / count - 0.5
    }
  }
  const uniform = 1 / BINS
  for (let bin = 0; bin < BINS * 3; bin++) {
    features[GRID * GRID * 3 + bin] = histogram[bin] / total - uniform
  }

  let norm = Math.sqrt(features.reduce((acc, v) => acc + v * v, 0))
  if (norm === 0) {
    // perfectly mid-gray image: fall back to a fixed unit basis vector
    features[0] = 1
    norm = 1
  }
  return features.map((v) => v / norm)
}

export function encodeImage(path: string): number[] {
  return encodePixels(decodePng(path))
}

export function cosine(a: number[], b: number[]): number {
  let dot = 0
  for (let i = 0; i < a.length; i++) dot += a[i] * b[i]
  return dot
}
