import { describe, expect, it } from 'vitest';

import { SlotView, ViewerState } from '../src/state';

describe('linked navigation', () => {
  it('axial click at (2,3) on slice 5 retargets coronal 3 and sagittal 2', () => {
    const slot = new SlotView([10, 10, 10]);
    slot.setSlice('axial', 5);
    expect(slot.linkedNavigate('axial', 2, 3)).toBe(true);
    expect(slot.sliceIndex('coronal')).toBe(3);
    expect(slot.sliceIndex('sagittal')).toBe(2);
    expect(slot.sliceIndex('axial')).toBe(5);
  });

  it('draws the cursor marker at the mapped in-plane point', () => {
    const slot = new SlotView([10, 12, 14]);
    slot.setSlice('axial', 5);
    slot.linkedNavigate('axial', 2, 3);
    // coronal shows (x, z): u = 2, v = 5; sagittal shows (y, z): u = 3, v = 5
    expect(slot.cursor('coronal')).toEqual({ u: 2, v: 5 });
    expect(slot.cursor('sagittal')).toEqual({ u: 3, v: 5 });
  });

  it('ignores out-of-bounds clicks', () => {
    const slot = new SlotView([10, 10, 10]);
    const before = [...slot.indices];
    expect(slot.linkedNavigate('axial', -1, 3)).toBe(false);
    expect(slot.linkedNavigate('axial', 3, 10)).toBe(false);
    expect(slot.indices).toEqual(before);
  });

  it('is idempotent for repeated identical clicks', () => {
    const slot = new SlotView([10, 10, 10]);
    slot.linkedNavigate('coronal', 4, 7);
    const once = [...slot.indices];
    slot.linkedNavigate('coronal', 4, 7);
    expect(slot.indices).toEqual(once);
  });

  it('mutual view clicks only move the clicked slot', () => {
    const state = new ViewerState('abc', [
      [10, 10, 10],
      [8, 8, 8],
    ]);
    const before = [...state.slot(0).indices];
    expect(state.clickOn(1, 'axial', 1, 2)).toBe(true);
    expect(state.slot(0).indices).toEqual(before);
    expect(state.slot(1).indices.slice(0, 2)).toEqual([1, 2]);
  });
});

describe('gestures and settings', () => {
  it('gates polygon submission on 3 points', () => {
    const state = new ViewerState('abc', [[10, 10, 10]]);
    state.addGesturePoint(1, 1);
    state.addGesturePoint(5, 1);
    expect(state.canSubmitPolygon()).toBe(false);
    state.addGesturePoint(3, 5);
    expect(state.canSubmitPolygon()).toBe(true);
    state.clearGesture();
    expect(state.canSubmitPolygon()).toBe(false);
  });

  it('rejects invalid slice indices', () => {
    const slot = new SlotView([4, 5, 6]);
    expect(slot.setSlice('axial', 6)).toBe(false);
    expect(slot.setSlice('axial', 5)).toBe(true);
  });

  it('window/level is shared per slot and validated', () => {
    const slot = new SlotView([4, 4, 4]);
    slot.setWindowLevel(100, 50);
    expect(slot.window).toBe(100);
    expect(() => slot.setWindowLevel(-1, 0)).toThrow();
  });
});
