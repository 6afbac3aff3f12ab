/**
 * 2D view transform between screen (view) coordinates and in-plane voxel
 * coordinates. Forward maps voxel -> view; the inverse is applied to every
 * pointer gesture before it is submitted, so the server never sees zoom
 * or pan state.
 */

export interface Vec2 {
  u: number;
  v: number;
}

export class ViewTransform {
  constructor(public zoom: number, public pan: Vec2) {
    if (!(zoom > 0)) {
      throw new Error(`zoom must be > 0, got ${zoom}`);
    }
  }

  /** voxel -> view: scale about the origin, then translate. */
  forward(p: Vec2): Vec2 {
    return { u: p.u * this.zoom + this.pan.u, v: p.v * this.zoom + this.pan.v };
  }

  /** view -> voxel: the exact inverse of forward. */
  inverse(p: Vec2): Vec2 {
    return { u: (p.u - this.pan.u) / this.zoom, v: (p.v - this.pan.v) / this.zoom };
  }

  withZoom(zoom: number): ViewTransform {
    return new ViewTransform(zoom, this.pan);
  }

  withPan(pan: Vec2): ViewTransform {
    return new ViewTransform(this.zoom, pan);
  }
}

export const identityTransform = (): ViewTransform =>
  new ViewTransform(1, { u: 0, v: 0 });
