import { describe, expect, it } from 'vitest';

import { decodeMesh, meshBounds, meshIsEmpty } from '../src/mesh';

function buildBuffer(vertices: number[][], triangles: number[][]): ArrayBuffer {
  const buf = new ArrayBuffer(8 + vertices.length * 12 + triangles.length * 12);
  const view = new DataView(buf);
  view.setUint32(0, vertices.length, true);
  view.setUint32(4, triangles.length, true);
  let off = 8;
  for (const v of vertices) {
    for (const c of v) {
      view.setFloat32(off, c, true);
      off += 4;
    }
  }
  for (const t of triangles) {
    for (const i of t) {
      view.setUint32(off, i, true);
      off += 4;
    }
  }
  return buf;
}

describe('mesh decoding', () => {
  it('round-trips a single triangle', () => {
    const buf = buildBuffer(
      [
        [0, 0, 0],
        [1, 0, 0],
        [0, 2, 0.5],
      ],
      [[0, 1, 2]],
    );
    const mesh = decodeMesh(buf);
    expect(Array.from(mesh.indices)).toEqual([0, 1, 2]);
    expect(mesh.vertices[3]).toBe(1);
    expect(mesh.vertices[7]).toBe(2);
    expect(meshIsEmpty(mesh)).toBe(false);
    expect(meshBounds(mesh)).toEqual({ min: [0, 0, 0], max: [1, 2, 0.5] });
  });

  it('decodes the empty mesh', () => {
    const mesh = decodeMesh(buildBuffer([], []));
    expect(meshIsEmpty(mesh)).toBe(true);
    expect(meshBounds(mesh)).toBeNull();
  });

  it('rejects truncated buffers', () => {
    const buf = buildBuffer([[0, 0, 0]], [[0, 0, 0]]);
    expect(() => decodeMesh(buf.slice(0, buf.byteLength - 4))).toThrow();
    expect(() => decodeMesh(new ArrayBuffer(4))).toThrow();
  });
});
