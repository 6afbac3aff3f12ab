/**
 * Viewer state: per-plane slice indices linked through a shared 3D cursor,
 * per-view zoom/pan, window/level shared by all views of a slot, and the
 * active tool. Pure state; no DOM and no label-map computation.
 */

import { ViewTransform, identityTransform } from './transform';

export type Plane = 'axial' | 'coronal' | 'sagittal';

export const PLANES: Plane[] = ['axial', 'coronal', 'sagittal'];

/** Free in-plane axes (by x/y/z index) for each plane; the remaining axis
 * is the slice index. Matches the service's slice orientation. */
const FREE_AXES: Record<Plane, [number, number]> = {
  axial: [0, 1],
  coronal: [0, 2],
  sagittal: [1, 2],
};

const FIXED_AXIS: Record<Plane, number> = { axial: 2, coronal: 1, sagittal: 0 };

export interface ToolParams {
  name: 'polygon_fill' | 'region_grow' | 'erase';
  label: number;
  radius: number;
}

export class SlotView {
  indices: [number, number, number]; // current x/y/z cursor voxel
  transforms: Record<Plane, ViewTransform>;
  window: number;
  level: number;

  constructor(public dims: [number, number, number], window = 255, level = 127.5) {
    this.indices = [
      Math.floor(dims[0] / 2),
      Math.floor(dims[1] / 2),
      Math.floor(dims[2] / 2),
    ];
    this.transforms = {
      axial: identityTransform(),
      coronal: identityTransform(),
      sagittal: identityTransform(),
    };
    this.window = window;
    this.level = level;
  }

  sliceIndex(plane: Plane): number {
    return this.indices[FIXED_AXIS[plane]];
  }

  /** In-plane cursor position for drawing the crosshair marker. */
  cursor(plane: Plane): { u: number; v: number } {
    const [ua, va] = FREE_AXES[plane];
    return { u: this.indices[ua], v: this.indices[va] };
  }

  planeSize(plane: Plane): { width: number; height: number } {
    const [ua, va] = FREE_AXES[plane];
    return { width: this.dims[ua], height: this.dims[va] };
  }

  inBounds(plane: Plane, u: number, v: number): boolean {
    const { width, height } = this.planeSize(plane);
    return u >= 0 && u < width && v >= 0 && v < height;
  }

  /**
   * A click at in-plane voxel (u, v) on the plane's current slice moves the
   * shared cursor, which re-targets the other two planes. Out-of-bounds
   * clicks are ignored; repeated identical clicks are idempotent.
   */
  linkedNavigate(plane: Plane, u: number, v: number): boolean {
    const ui = Math.round(u);
    const vi = Math.round(v);
    if (!this.inBounds(plane, ui, vi)) {
      return false;
    }
    const [ua, va] = FREE_AXES[plane];
    this.indices[ua] = ui;
    this.indices[va] = vi;
    return true;
  }

  setSlice(plane: Plane, index: number): boolean {
    const n = this.dims[FIXED_AXIS[plane]];
    if (index < 0 || index >= n) {
      return false;
    }
    this.indices[FIXED_AXIS[plane]] = index;
    return true;
  }

  setWindowLevel(window: number, level: number): void {
    if (window < 0) {
      throw new Error(`window must be >= 0, got ${window}`);
    }
    this.window = window;
    this.level = level;
  }
}

export class ViewerState {
  activeSlot = 0;
  slots: SlotView[] = [];
  tool: ToolParams = { name: 'polygon_fill', label: 1, radius: 5 };
  gesture: { u: number; v: number }[] = [];

  constructor(public sessionId: string, dims: [number, number, number][]) {
    for (const d of dims) {
      this.slots.push(new SlotView(d));
    }
  }

  slot(index = this.activeSlot): SlotView {
    const s = this.slots[index];
    if (!s) {
      throw new Error(`no slot ${index}`);
    }
    return s;
  }

  /** Clicks in the mutual (two-image) view only move the clicked slot. */
  clickOn(slotIndex: number, plane: Plane, u: number, v: number): boolean {
    return this.slot(slotIndex).linkedNavigate(plane, u, v);
  }

  addGesturePoint(u: number, v: number): void {
    this.gesture.push({ u, v });
  }

  clearGesture(): void {
    this.gesture = [];
  }

  /** Polygon submission is gated on arity; a 2-point gesture stays disabled. */
  canSubmitPolygon(): boolean {
    return this.gesture.length >= 3;
  }
}
