/**
 * Browser entry point: three linked slice canvases, a polygon tool, undo,
 * and a running mesh summary. All computation happens on the service; this
 * file only wires DOM events to the client modules.
 */

import { ServiceClient, ServiceError } from './api';
import { decodeMesh, meshIsEmpty } from './mesh';
import { previewCount } from './raster';
import { Plane, PLANES, ViewerState } from './state';

const SERVICE_URL = 'http://127.0.0.1:8977';

class App {
  client = new ServiceClient(SERVICE_URL);
  state: ViewerState | null = null;
  canvases = new Map<Plane, HTMLCanvasElement>();

  async open(volumePath: string): Promise<void> {
    const info = await this.client.createSession(volumePath);
    this.state = new ViewerState(
      info.id,
      info.slots.map((s) => s.dims),
    );
    await this.refreshAll();
  }

  private async refreshAll(): Promise<void> {
    await Promise.all(PLANES.map((p) => this.refresh(p)));
  }

  private async refresh(plane: Plane): Promise<void> {
    if (!this.state) return;
    const slot = this.state.slot();
    const canvas = this.canvases.get(plane);
    if (!canvas) return;
    const png = await this.client.fetchSlice(
      this.state.sessionId,
      this.state.activeSlot,
      plane,
      slot.sliceIndex(plane),
      { overlay: true, window: slot.window, level: slot.level },
    );
    const bitmap = await createImageBitmap(new Blob([png], { type: 'image/png' }));
    const ctx = canvas.getContext('2d');
    if (!ctx) return;
    canvas.width = bitmap.width;
    canvas.height = bitmap.height;
    ctx.drawImage(bitmap, 0, 0);
    const cursor = slot.cursor(plane);
    const view = slot.transforms[plane].forward(cursor);
    ctx.strokeStyle = '#ffd400';
    ctx.beginPath();
    ctx.moveTo(view.u - 4, view.v);
    ctx.lineTo(view.u + 4, view.v);
    ctx.moveTo(view.u, view.v - 4);
    ctx.lineTo(view.u, view.v + 4);
    ctx.stroke();
  }

  async onClick(plane: Plane, viewU: number, viewV: number): Promise<void> {
    if (!this.state) return;
    const slot = this.state.slot();
    const voxel = slot.transforms[plane].inverse({ u: viewU, v: viewV });
    if (this.state.tool.name === 'polygon_fill') {
      this.state.addGesturePoint(voxel.u, voxel.v);
      return;
    }
    if (slot.linkedNavigate(plane, voxel.u, voxel.v)) {
      await this.refreshAll();
    }
  }

  async submitPolygon(plane: Plane): Promise<number> {
    if (!this.state || !this.state.canSubmitPolygon()) return 0;
    const slot = this.state.slot();
    const { width, height } = slot.planeSize(plane);
    const preview = previewCount(width, height, this.state.gesture);
    try {
      const result = await this.client.applyTool(
        this.state.sessionId,
        this.state.activeSlot,
        'polygon_fill',
        {
          plane,
          index: slot.sliceIndex(plane),
          points: this.state.gesture.map((p) => [p.u, p.v]),
          label: this.state.tool.label,
        },
      );
      this.toast(`filled ${result.changed} px (preview ${preview})`);
      this.state.clearGesture();
      await this.refresh(plane);
      await this.refreshMesh();
      return result.changed;
    } catch (err) {
      if (err instanceof ServiceError) {
        this.toast(`error: ${err.message}`);
        return 0;
      }
      throw err;
    }
  }

  async undo(): Promise<void> {
    if (!this.state) return;
    try {
      await this.client.undo(this.state.sessionId, this.state.activeSlot);
      await this.refreshAll();
      await this.refreshMesh();
    } catch (err) {
      if (err instanceof ServiceError) {
        this.toast(err.status === 409 ? 'nothing to undo' : err.message);
        return;
      }
      throw err;
    }
  }

  private async refreshMesh(): Promise<void> {
    if (!this.state) return;
    const buf = await this.client.fetchMesh(
      this.state.sessionId,
      this.state.activeSlot,
      this.state.tool.label,
    );
    const mesh = decodeMesh(buf);
    const summary = meshIsEmpty(mesh)
      ? 'no surface'
      : `${mesh.vertices.length / 3} verts / ${mesh.indices.length / 3} tris`;
    const el = document.getElementById('mesh-summary');
    if (el) el.textContent = summary;
  }

  private toast(text: string): void {
    const el = document.getElementById('toast');
    if (el) el.textContent = text;
  }
}

if (typeof document !== 'undefined') {
  const app = new App();
  window.addEventListener('DOMContentLoaded', () => {
    for (const plane of PLANES) {
      const canvas = document.getElementById(`view-${plane}`);
      if (canvas instanceof HTMLCanvasElement) {
        app.canvases.set(plane, canvas);
        canvas.addEventListener('click', (ev) => {
          const rect = canvas.getBoundingClientRect();
          void app.onClick(plane, ev.clientX - rect.left, ev.clientY - rect.top);
        });
        canvas.addEventListener('dblclick', () => void app.submitPolygon(plane));
      }
    }
    document
      .getElementById('undo')
      ?.addEventListener('click', () => void app.undo());
    const input = document.getElementById('volume-path');
    document.getElementById('open')?.addEventListener('click', () => {
      if (input instanceof HTMLInputElement && input.value) {
        void app.open(input.value);
      }
    });
  });
}

export { App };
