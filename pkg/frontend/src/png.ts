/**
 * Dependency-free PNG rasterization of the butterfly geometry: horizontal
 * segments stamped onto an RGBA buffer, encoded with zlib from node core.
 * Raster output is a convenience conversion; SVG stays the reference.
 */

import * as zlib from "node:zlib";

import { Geometry, Segment } from "./render.js";

function crc32(buf: Uint8Array): number {
  let crc = 0xffffffff;
  for (let i = 0; i < buf.length; i++) {
    crc ^= buf[i];
    for (let k = 0; k < 8; k++) {
      crc = (crc >>> 1) ^ (0xedb88320 & -(crc & 1));
    }
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Uint8Array): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(data.length, 0);
  head.write(type, 4, "ascii");
  const body = Buffer.concat([head.subarray(4), Buffer.from(data)]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body), 0);
  return Buffer.concat([head.subarray(0, 4), body, crc]);
}

function parseHex(color: string): [number, number, number] {
  const hex = color.replace("#", "");
  return [
    parseInt(hex.slice(0, 2), 16),
    parseInt(hex.slice(2, 4), 16),
    parseInt(hex.slice(4, 6), 16),
  ];
}

export function encodePng(width: number, height: number, rgba: Uint8Array): Buffer {
  const signature = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // color type RGBA
  // raw scanlines, filter byte 0 per row
  const raw = Buffer.alloc(height * (1 + width * 4));
  for (let y = 0; y < height; y++) {
    const src = y * width * 4;
    raw.set(rgba.subarray(src, src + width * 4), y * (1 + width * 4) + 1);
  }
  const idat = zlib.deflateSync(raw, { level: 6 });
  return Buffer.concat([
    signature,
    chunk("IHDR", ihdr),
    chunk("IDAT", idat),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

export function rasterizeButterfly(geo: Geometry, width: number, height: number): Buffer {
  const rgba = new Uint8Array(width * height * 4).fill(255);
  const put = (x: number, y: number, rgb: [number, number, number]) => {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const o = (y * width + x) * 4;
    rgba[o] = rgb[0];
    rgba[o + 1] = rgb[1];
    rgba[o + 2] = rgb[2];
  };
  const hline = (seg: Segment) => {
    const y = Math.round(seg.y);
    const rgb = parseHex(seg.color);
    for (let x = Math.round(seg.x1); x <= Math.round(seg.x2); x++) {
      put(x, y, rgb);
    }
  };
  // plot frame
  const frame: [number, number, number] = [34, 34, 34];
  const { x, y, width: w, height: h } = geo.plot;
  for (let i = Math.round(x); i <= Math.round(x + w); i++) {
    put(i, Math.round(y), frame);
    put(i, Math.round(y + h), frame);
  }
  for (let j = Math.round(y); j <= Math.round(y + h); j++) {
    put(Math.round(x), j, frame);
    put(Math.round(x + w), j, frame);
  }
  geo.segments.forEach(hline);
  return encodePng(width, height, rgba);
}
