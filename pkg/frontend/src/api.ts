/**
 * Thin typed client for the segmentation service HTTP API. Every method is
 * a single fetch; errors carry the server's JSON error text so the UI can
 * surface it in a toast.
 */

export interface SlotInfo {
  dims: [number, number, number];
  spacing: [number, number, number];
}

export interface SessionInfo {
  id: string;
  slots: SlotInfo[];
}

export interface ToolResult {
  changed: number;
}

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function raise(resp: Response): Promise<never> {
  let message = `${resp.status}`;
  try {
    const body = await resp.json();
    if (body && typeof body.error === 'string') {
      message = body.error;
    }
  } catch {
    // non-JSON body; keep the status text
  }
  throw new ServiceError(resp.status, message);
}

export class ServiceClient {
  constructor(public baseUrl: string) {}

  private async postJson(path: string, body: unknown): Promise<any> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      await raise(resp);
    }
    return resp.json();
  }

  async createSession(path: string, secondPath?: string): Promise<SessionInfo> {
    return this.postJson('/sessions', { path, second_path: secondPath });
  }

  sliceUrl(
    sid: string,
    slot: number,
    plane: string,
    index: number,
    opts: { overlay?: boolean; window?: number; level?: number } = {},
  ): string {
    const params = new URLSearchParams({ plane, index: String(index) });
    if (opts.overlay) params.set('overlay', 'true');
    if (opts.window !== undefined) params.set('window', String(opts.window));
    if (opts.level !== undefined) params.set('level', String(opts.level));
    return `${this.baseUrl}/sessions/${sid}/slots/${slot}/slice?${params}`;
  }

  async fetchSlice(
    sid: string,
    slot: number,
    plane: string,
    index: number,
    opts: { overlay?: boolean; window?: number; level?: number } = {},
  ): Promise<ArrayBuffer> {
    const resp = await fetch(this.sliceUrl(sid, slot, plane, index, opts));
    if (!resp.ok) {
      await raise(resp);
    }
    return resp.arrayBuffer();
  }

  async applyTool(
    sid: string,
    slot: number,
    name: string,
    body: Record<string, unknown>,
  ): Promise<ToolResult> {
    return this.postJson(`/sessions/${sid}/slots/${slot}/tools/${name}`, body);
  }

  async undo(sid: string, slot: number): Promise<ToolResult> {
    return this.postJson(`/sessions/${sid}/slots/${slot}/undo`, {});
  }

  async redo(sid: string, slot: number): Promise<ToolResult> {
    return this.postJson(`/sessions/${sid}/slots/${slot}/redo`, {});
  }

  async fetchMesh(sid: string, slot: number, label: number): Promise<ArrayBuffer> {
    const resp = await fetch(
      `${this.baseUrl}/sessions/${sid}/slots/${slot}/mesh?label=${label}`,
    );
    if (!resp.ok) {
      await raise(resp);
    }
    return resp.arrayBuffer();
  }

  async addMeasurement(sid: string, body: Record<string, unknown>): Promise<any> {
    return this.postJson(`/sessions/${sid}/measurements`, body);
  }

  async listMeasurements(sid: string): Promise<any[]> {
    const resp = await fetch(`${this.baseUrl}/sessions/${sid}/measurements`);
    if (!resp.ok) {
      await raise(resp);
    }
    return (await resp.json()).measurements;
  }

  async histogram(sid: string, slot: number, bins = 64): Promise<{
    counts: number[];
    edges: number[];
  }> {
    const resp = await fetch(
      `${this.baseUrl}/sessions/${sid}/slots/${slot}/histogram?bins=${bins}`,
    );
    if (!resp.ok) {
      await raise(resp);
    }
    return resp.json();
  }
}
