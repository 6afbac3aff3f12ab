/**
 * Decoder for the service's binary mesh payload: two little-endian uint32
 * counts (vertices, triangles) followed by float32 xyz positions and
 * uint32 index triples.
 */

export interface Mesh {
  vertices: Float32Array; // 3 * vertexCount entries, xyz interleaved
  indices: Uint32Array; // 3 * triangleCount entries
}

export function decodeMesh(buffer: ArrayBuffer): Mesh {
  if (buffer.byteLength < 8) {
    throw new Error(`mesh buffer too short: ${buffer.byteLength} bytes`);
  }
  const head = new DataView(buffer);
  const nVertices = head.getUint32(0, true);
  const nTriangles = head.getUint32(4, true);
  const expected = 8 + nVertices * 12 + nTriangles * 12;
  if (buffer.byteLength < expected) {
    throw new Error(
      `mesh buffer truncated: need ${expected} bytes, have ${buffer.byteLength}`,
    );
  }
  const vertices = new Float32Array(buffer, 8, nVertices * 3);
  const indices = new Uint32Array(buffer, 8 + nVertices * 12, nTriangles * 3);
  return { vertices, indices };
}

export function meshIsEmpty(mesh: Mesh): boolean {
  return mesh.indices.length === 0;
}

/** Axis-aligned bounds, handy for centering the preview camera. */
export function meshBounds(mesh: Mesh): { min: number[]; max: number[] } | null {
  if (mesh.vertices.length === 0) {
    return null;
  }
  const min = [Infinity, Infinity, Infinity];
  const max = [-Infinity, -Infinity, -Infinity];
  for (let i = 0; i < mesh.vertices.length; i += 3) {
    for (let k = 0; k < 3; k++) {
      min[k] = Math.min(min[k], mesh.vertices[i + k]);
      max[k] = Math.max(max[k], mesh.vertices[i + k]);
    }
  }
  return { min, max };
}
