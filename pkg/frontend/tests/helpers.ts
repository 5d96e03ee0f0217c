// Shared test scaffolding: deterministic RNG, in-memory storage, a
// fake window, golden bundle access, and a mock task engine that
// speaks the same HTTP surface the real one serves.

import { readFileSync } from 'node:fs';
import path from 'node:path';
import { fileURLToPath } from 'node:url';
import type { FetchLike } from '../src/sync-engine';
import type { StorageLike } from '../src/store';
import type { Bootstrap, Manifest, SyncAck, SyncItem } from '../src/types';

const HERE = path.dirname(fileURLToPath(import.meta.url));
export const GOLDEN_DIR = path.resolve(HERE, '../../tests/golden/approval_tasks');
export const FIXTURES_DIR = path.resolve(HERE, '../../tests/fixtures');

export function goldenAsset(rel: string): string {
  return readFileSync(path.join(GOLDEN_DIR, rel), 'utf8');
}

export function goldenManifest(): Manifest {
  return JSON.parse(goldenAsset('manifest.json')) as Manifest;
}

export function fixture(rel: string): string {
  return readFileSync(path.join(FIXTURES_DIR, rel), 'utf8');
}

// Small deterministic PRNG so property suites replay exactly.
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function randInt(rand: () => number, bound: number): number {
  return Math.floor(rand() * bound);
}

export function pick<T>(rand: () => number, items: T[]): T {
  return items[randInt(rand, items.length)];
}

export class FakeStorage implements StorageLike {
  map = new Map<string, string>();

  getItem(key: string): string | null {
    return this.map.has(key) ? (this.map.get(key) as string) : null;
  }

  setItem(key: string, value: string): void {
    this.map.set(key, String(value));
  }

  removeItem(key: string): void {
    this.map.delete(key);
  }

  keys(): string[] {
    return [...this.map.keys()];
  }
}

export class FakeWindow {
  innerWidth = 375;
  innerHeight = 667;
  navigator: { userAgent: string; onLine: boolean } = {
    userAgent: 'Mozilla/5.0 (iPhone; CPU iPhone OS 16_0 like Mac OS X)',
    onLine: true,
  };
  document: Document = document;
  private listeners = new Map<string, Set<() => void>>();

  addEventListener(type: string, fn: () => void): void {
    if (!this.listeners.has(type)) this.listeners.set(type, new Set());
    this.listeners.get(type)!.add(fn);
  }

  removeEventListener(type: string, fn: () => void): void {
    this.listeners.get(type)?.delete(fn);
  }

  fire(type: string): void {
    for (const fn of [...(this.listeners.get(type) ?? [])]) fn();
  }

  setOnline(v: boolean): void {
    this.navigator.onLine = v;
    this.fire(v ? 'online' : 'offline');
  }

  resize(w: number, h: number): void {
    this.innerWidth = w;
    this.innerHeight = h;
    this.fire('resize');
  }
}

export const TASK_DEFAULTS: Record<string, unknown> = {
  task_name: 'Employee Travel Fee Approval',
  status: 'waiting for approval',
  createDate: '2014-07-21',
  dueDate: '2014-07-22',
  role: null,
};

export interface EngineTask {
  instance: string;
  op: string;
  data: Record<string, unknown>;
  state: 'open' | 'completed';
}

interface MockResponse {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}

function respond(status: number, body: unknown, textBody?: string): MockResponse {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
    text: async () => textBody ?? JSON.stringify(body),
  };
}

// Speaks the engine's task endpoints over a fetch-shaped function:
// bundle assets, task UI pages with an injected bootstrap, direct
// result posts, and the batched sync endpoint with per-device
// sequence tracking.
export class MockEngine {
  offline = false;
  tasks = new Map<string, EngineTask>();
  completions: string[] = [];
  deviceSeq = new Map<string, number>();
  // Field name that the result schema rejects, when set.
  rejectField: string | null = null;
  requests: string[] = [];

  readonly fetch: FetchLike = async (url, init) => this.handle(url, init);

  seedTask(instance: string, op: string, data: Record<string, unknown> = {}): EngineTask {
    const task: EngineTask = {
      instance,
      op,
      data: { ...TASK_DEFAULTS, ...data },
      state: 'open',
    };
    this.tasks.set(instance, task);
    return task;
  }

  bootstrapFor(instance: string): Bootstrap {
    const t = this.tasks.get(instance);
    if (!t) throw new Error(`no seeded task ${instance}`);
    return {
      instance: t.instance,
      op: t.op,
      state: t.state === 'open' ? 'open' : 'completed',
      data: { ...t.data },
      submit_url: `/task/${t.instance}/result`,
      service: 'approval_tasks',
    };
  }

  private async handle(url: string, init?: { method?: string; body?: string }): Promise<MockResponse> {
    if (this.offline) throw new TypeError('fetch failed: network unreachable');
    const method = init?.method ?? 'GET';
    this.requests.push(`${method} ${url}`);

    const bundle = /^\/bundle\/approval_tasks\/(.+)$/.exec(url);
    if (bundle && method === 'GET') {
      try {
        const content = goldenAsset(bundle[1]);
        const body = bundle[1].endsWith('.json') ? JSON.parse(content) : content;
        return respond(200, body, content);
      } catch {
        return respond(404, { detail: 'no such asset' });
      }
    }

    const ui = /^\/task\/([^/]+)\/ui$/.exec(url);
    if (ui && method === 'GET') {
      const t = this.tasks.get(ui[1]);
      if (!t) return respond(404, { detail: 'unknown task instance' });
      if (t.state === 'completed') {
        return respond(410, { detail: 'finished' }, '<p>This task is already finished.</p>');
      }
      return respond(200, {}, this.taskPage(t));
    }

    const result = /^\/task\/([^/]+)\/result$/.exec(url);
    if (result && method === 'POST') {
      return this.directResult(result[1], JSON.parse(init?.body ?? '{}'));
    }

    if (url === '/sync' && method === 'POST') {
      return this.syncBatch(JSON.parse(init?.body ?? '{}'));
    }

    return respond(404, { detail: `no route for ${method} ${url}` });
  }

  private taskPage(t: EngineTask): string {
    const html = goldenAsset('screens/taskDetail.html');
    const boot = this.bootstrapFor(t.instance);
    const script =
      '<base href="/bundle/approval_tasks/screens/">' +
      `<script>window.MUIT_BOOTSTRAP = ${JSON.stringify(boot).replace(/<\//g, '<\\/')};</script>`;
    return html.replace('<head>', '<head>' + script);
  }

  private directResult(instance: string, body: Record<string, unknown>): MockResponse {
    const t = this.tasks.get(instance);
    if (!t) return respond(404, { detail: 'unknown task instance', status: 'NotFound' });
    if (this.rejectField && this.rejectField in body) {
      return respond(422, {
        detail: `field ${this.rejectField} not allowed`,
        path: this.rejectField,
        status: 'Rejected',
      });
    }
    if (t.state === 'completed') {
      return respond(200, { instance_id: instance, status: 'AlreadyCompleted' });
    }
    t.state = 'completed';
    Object.assign(t.data, body);
    this.completions.push(instance);
    return respond(200, { instance_id: instance, status: 'Completed' });
  }

  private syncBatch(body: { device_id?: string; items?: SyncItem[] }): MockResponse {
    const deviceId = body.device_id ?? '';
    const items = body.items ?? [];
    if (!deviceId) return respond(400, { detail: 'device_id required' });
    for (let i = 1; i < items.length; i++) {
      if (items[i].seq <= items[i - 1].seq) {
        return respond(400, { detail: 'seqs must be strictly increasing' });
      }
    }
    const acks: SyncAck[] = items.map((item) => this.applyItem(deviceId, item));
    return respond(200, { device_id: deviceId, acks });
  }

  private applyItem(deviceId: string, item: SyncItem): SyncAck {
    const last = this.deviceSeq.get(deviceId) ?? -1;
    if (item.seq <= last) {
      return { instance_id: item.instance_id, seq: item.seq, status: 'AlreadyApplied' };
    }
    this.deviceSeq.set(deviceId, item.seq);
    const t = this.tasks.get(item.instance_id);
    if (!t) {
      return {
        instance_id: item.instance_id,
        seq: item.seq,
        status: 'NotFound',
        detail: 'unknown task instance',
      };
    }
    if (this.rejectField && this.rejectField in item.data) {
      return {
        instance_id: item.instance_id,
        seq: item.seq,
        status: 'Rejected',
        detail: `field ${this.rejectField} not allowed`,
      };
    }
    if (t.state === 'completed') {
      return { instance_id: item.instance_id, seq: item.seq, status: 'AlreadyCompleted' };
    }
    t.state = 'completed';
    Object.assign(t.data, item.data);
    this.completions.push(t.instance);
    return { instance_id: item.instance_id, seq: item.seq, status: 'Completed' };
  }
}

// Let queued microtasks and zero-delay timers settle.
export async function flushAsync(rounds = 6): Promise<void> {
  for (let i = 0; i < rounds; i++) {
    await new Promise((r) => setTimeout(r, 0));
  }
}

export function makeRoot(): Element {
  const el = document.createElement('div');
  el.id = 'app-root';
  document.body.appendChild(el);
  return el;
}

export function cleanRoot(el: Element): void {
  el.remove();
}
