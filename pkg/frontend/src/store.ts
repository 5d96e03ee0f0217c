// Durable device-side state, schema muit_store_v1.
//
// Everything lives in one key-value storage area (localStorage in a
// real browser) under a versioned prefix:
//
//   muit_store_v1/device            stable device id
//   muit_store_v1/seq               next op-sequence number
//   muit_store_v1/pending           results awaiting upload
//   muit_store_v1/failed            results the server rejected, kept visible
//   muit_store_v1/applied           seq numbers already folded into the task cache
//   muit_store_v1/app               last booted app name
//   muit_store_v1/asset/<sha>       bundle asset, addressed by content hash
//   muit_store_v1/manifest/<app>    cached manifest
//   muit_store_v1/tasks/<app>       cached task snapshots for the inbox

import type { Manifest, SyncItem, InboxTask } from './types';

export const SCHEMA = 'muit_store_v1';

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export async function sha256Hex(content: string): Promise<string> {
  const bytes = new TextEncoder().encode(content);
  const digest = await crypto.subtle.digest('SHA-256', bytes);
  return Array.from(new Uint8Array(digest))
    .map((b) => b.toString(16).padStart(2, '0'))
    .join('');
}

function randomDeviceId(): string {
  const c = globalThis.crypto;
  if (c && typeof c.randomUUID === 'function') return c.randomUUID();
  return 'dev-' + Math.random().toString(36).slice(2) + Date.now().toString(36);
}

export interface FailedItem {
  item: SyncItem;
  status: string;
  detail?: string;
}

export class OfflineStore {
  constructor(private backing: StorageLike) {}

  private key(...parts: string[]): string {
    return [SCHEMA, ...parts].join('/');
  }

  private readJson<T>(key: string, fallback: T): T {
    try {
      const raw = this.backing.getItem(key);
      return raw === null ? fallback : (JSON.parse(raw) as T);
    } catch {
      return fallback;
    }
  }

  private writeJson(key: string, value: unknown): void {
    this.backing.setItem(key, JSON.stringify(value));
  }

  // -- identity and sequencing --------------------------------------

  deviceId(): string {
    const key = this.key('device');
    let id = this.backing.getItem(key);
    if (id === null) {
      id = randomDeviceId();
      this.backing.setItem(key, id);
    }
    return id;
  }

  // Strictly increasing across reloads: the counter is persisted
  // before the number is handed out.
  nextSeq(): number {
    const key = this.key('seq');
    const current = Number(this.backing.getItem(key) ?? '0');
    this.backing.setItem(key, String(current + 1));
    return current;
  }

  peekSeq(): number {
    return Number(this.backing.getItem(this.key('seq')) ?? '0');
  }

  // -- pending results ----------------------------------------------

  enqueue(instanceId: string, data: Record<string, unknown>): SyncItem {
    const item: SyncItem = {
      instance_id: instanceId,
      seq: this.nextSeq(),
      data,
      submitted_at: new Date().toISOString(),
    };
    const pending = this.pending();
    pending.push(item);
    this.writeJson(this.key('pending'), pending);
    return item;
  }

  pending(): SyncItem[] {
    const items = this.readJson<SyncItem[]>(this.key('pending'), []);
    items.sort((a, b) => a.seq - b.seq);
    return items;
  }

  prune(seqs: number[]): void {
    const gone = new Set(seqs);
    this.writeJson(
      this.key('pending'),
      this.pending().filter((item) => !gone.has(item.seq)),
    );
  }

  markFailed(item: SyncItem, status: string, detail?: string): void {
    const failed = this.failures();
    failed.push({ item, status, detail });
    this.writeJson(this.key('failed'), failed);
    this.prune([item.seq]);
  }

  failures(): FailedItem[] {
    return this.readJson<FailedItem[]>(this.key('failed'), []);
  }

  clearFailure(seq: number): void {
    this.writeJson(
      this.key('failed'),
      this.failures().filter((f) => f.item.seq !== seq),
    );
  }

  // -- asset cache (content-addressed) ------------------------------

  putAsset(hash: string, content: string): void {
    this.backing.setItem(this.key('asset', stripPrefix(hash)), content);
  }

  getAsset(hash: string): string | null {
    return this.backing.getItem(this.key('asset', stripPrefix(hash)));
  }

  hasAsset(hash: string): boolean {
    return this.getAsset(hash) !== null;
  }

  // -- manifests and task snapshots ---------------------------------

  putManifest(manifest: Manifest): void {
    this.writeJson(this.key('manifest', manifest.app), manifest);
    this.backing.setItem(this.key('app'), manifest.app);
  }

  getManifest(app: string): Manifest | null {
    return this.readJson<Manifest | null>(this.key('manifest', app), null);
  }

  lastApp(): string | null {
    return this.backing.getItem(this.key('app'));
  }

  putTasks(app: string, tasks: InboxTask[]): void {
    this.writeJson(this.key('tasks', app), tasks);
  }

  getTasks(app: string): InboxTask[] {
    return this.readJson<InboxTask[]>(this.key('tasks', app), []);
  }

  // Folds a captured result into the cached task list.  Replaying the
  // same item is a no-op, which makes reload-time recovery safe.
  applyResult(app: string, item: SyncItem): boolean {
    const appliedKey = this.key('applied');
    const applied = this.readJson<number[]>(appliedKey, []);
    if (applied.includes(item.seq)) return false;
    const tasks = this.getTasks(app);
    for (const task of tasks) {
      if (task.instance_id === item.instance_id) {
        Object.assign(task.data, item.data);
        task.pending = true;
      }
    }
    this.putTasks(app, tasks);
    applied.push(item.seq);
    this.writeJson(appliedKey, applied);
    return true;
  }

  settleTask(app: string, instanceId: string, error?: string): void {
    const tasks = this.getTasks(app);
    for (const task of tasks) {
      if (task.instance_id === instanceId) {
        task.pending = false;
        if (error) task.error = error;
        else delete task.error;
      }
    }
    this.putTasks(app, tasks);
  }
}

function stripPrefix(hash: string): string {
  return hash.startsWith('sha256:') ? hash.slice(7) : hash;
}
