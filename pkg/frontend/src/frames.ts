/**
 * Length-prefixed frames shared with the Python bridge.
 *
 * Wire layout: 4-byte little-endian header length, UTF-8 JSON header, then
 * `header.nbytes` bytes of raw payload (little-endian float64 arrays).
 */

export interface FrameHeader {
  type: string;
  nbytes: number;
  [key: string]: unknown;
}

export interface Frame {
  header: FrameHeader;
  payload: Buffer;
}

export function encodeFrame(header: Record<string, unknown>, payload?: Buffer): Buffer {
  const withSize = { ...header, nbytes: payload?.length ?? 0 };
  const head = Buffer.from(JSON.stringify(withSize), "utf8");
  const len = Buffer.alloc(4);
  len.writeUInt32LE(head.length, 0);
  return payload && payload.length > 0
    ? Buffer.concat([len, head, payload])
    : Buffer.concat([len, head]);
}

/** Incremental parser: feed stream chunks, emits complete frames. */
export class FrameReader {
  private buf: Buffer = Buffer.alloc(0);

  push(chunk: Buffer): Frame[] {
    this.buf = this.buf.length === 0 ? chunk : Buffer.concat([this.buf, chunk]);
    const frames: Frame[] = [];
    for (;;) {
      if (this.buf.length < 4) break;
      const headerLen = this.buf.readUInt32LE(0);
      if (this.buf.length < 4 + headerLen) break;
      const header = JSON.parse(
        this.buf.subarray(4, 4 + headerLen).toString("utf8"),
      ) as FrameHeader;
      const total = 4 + headerLen + (header.nbytes ?? 0);
      if (this.buf.length < total) break;
      const payload = this.buf.subarray(4 + headerLen, total);
      frames.push({ header, payload: Buffer.from(payload) });
      this.buf = this.buf.subarray(total);
    }
    return frames;
  }
}

export function float64View(payload: Buffer): Float64Array {
  // copy to an aligned buffer; Buffer slices may be mid-pool and unaligned
  const aligned = new ArrayBuffer(payload.length);
  new Uint8Array(aligned).set(payload);
  return new Float64Array(aligned);
}

export function float64Payload(values: ArrayLike<number>): Buffer {
  const arr = values instanceof Float64Array ? values : Float64Array.from(values as number[]);
  return Buffer.from(arr.buffer, arr.byteOffset, arr.byteLength);
}
