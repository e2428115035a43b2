/**
 * Embedding sidecar: newline-delimited JSON over stdio.
 *
 * Request:  {"paths": ["a.png", "b.png"]}
 * Response: {"vectors": [[...], [...]], "dim": 480}   (unit-norm, in order)
 * Errors:   {"error": "..."} for that request only; the loop keeps running.
 *
 * SIDECAR_ENCODER selects the encoder (only "grid-histogram-v1" ships in
 * this build); unknown names fail fast so a misconfigured pin is loud.
 */
import { createInterface } from 'node:readline'
import { DIM, encodeImage } from './encoder.js'

const ENCODERS: Record<string, (path: string) => number[]> = {
  'grid-histogram-v1': encodeImage,
}

export function resolveEncoder(name: string | undefined): (path: string) => number[] {
  const pinned = name || 'grid-histogram-v1'
  const encoder = ENCODERS[pinned]
  if (!encoder) {
    throw new Error(`unknown encoder ${pinned}; available: ${Object.keys(ENCODERS).join(', ')}`)
  }
  return encoder
}

export function handleRequest(line: string, encode: (path: string) => number[]): string {
  let request: unknown
  try {
    request = JSON.parse(line)
  } catch {
    return JSON.stringify({ error: 'request is not valid JSON' })
  }
  const paths = (request as { paths?: unknown }).paths
  if (!Array.isArray(paths) || paths.some((p) => typeof p !== 'string')) {
    return JSON.stringify({ error: 'request must be {"paths": [string, ...]}' })
  }
  try {
    const vectors = (paths as string[]).map((p) => encode(p))
    return JSON.stringify({ vectors, dim: DIM })
  } catch (err) {
    return JSON.stringify({ error: err instanceof Error ? err.message : String(err) })
  }
}

export function serve(): void {
  const encode = resolveEncoder(process.env.SIDECAR_ENCODER)
  const lines = createInterface({ input: process.stdin, terminal: false })
  lines.on('line', (line) => {
    if (!line.trim()) return
    process.stdout.write(handleRequest(line, encode) + '\n')
  })
}

const entry = process.argv[1] ?? ''
if (entry.endsWith('sidecar.js') || entry.endsWith('sidecar.ts')) {
  serve()
}
