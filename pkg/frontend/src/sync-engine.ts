// Result submission with offline capture and reconnect upload.
//
// Online submissions post straight to the task's result endpoint.
// Anything captured while offline (or when the post itself dies on the
// wire) joins the durable pending queue; the whole queue uploads as
// one ordered batch when connectivity returns.  Rejected items move to
// the failure list where the inbox shows them; nothing vanishes.

import { OfflineStore } from './store';
import type { SyncAck, SyncItem, SyncResponse } from './types';

export type FetchLike = (url: string, init?: any) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<any>;
}>;

export interface SyncEngineOptions {
  store: OfflineStore;
  app: string;
  fetchFn?: FetchLike;
  online?: () => boolean;
  syncUrl?: string;
  // Idle window after which the session closes until the next
  // interaction.
  idleMs?: number;
  onState?: (state: SyncState) => void;
}

export interface SyncState {
  pending: number;
  sessionOpen: boolean;
  lastError?: string;
}

export type SubmitOutcome =
  | { kind: 'accepted'; status: string }
  | { kind: 'queued'; seq: number }
  | { kind: 'rejected'; status: number; detail?: string };

export const ACK_DONE = new Set(['Completed', 'AlreadyCompleted', 'AlreadyApplied']);

export class SyncEngine {
  private store: OfflineStore;
  private app: string;
  private fetchFn: FetchLike;
  private isOnline: () => boolean;
  private syncUrl: string;
  private idleMs: number;
  private onState?: (state: SyncState) => void;
  private idleTimer: ReturnType<typeof setTimeout> | null = null;
  private open = true;
  private flushing: Promise<SyncAck[]> | null = null;
  private detach: Array<() => void> = [];

  constructor(options: SyncEngineOptions) {
    this.store = options.store;
    this.app = options.app;
    this.fetchFn = options.fetchFn ?? ((url, init) => fetch(url, init));
    this.isOnline = options.online ?? (() => navigator.onLine !== false);
    this.syncUrl = options.syncUrl ?? '/sync';
    this.idleMs = options.idleMs ?? 30_000;
    this.onState = options.onState;
    this.armIdleTimer();
  }

  // Wires connectivity and interaction events.  Interaction keeps the
  // session alive; reconnect triggers an upload.
  start(win: {
    addEventListener(type: string, fn: () => void): void;
    removeEventListener(type: string, fn: () => void): void;
  }): void {
    const onOnline = () => {
      this.flush().catch(() => undefined);
    };
    const onInteract = () => this.interaction();
    win.addEventListener('online', onOnline);
    for (const ev of ['pointerdown', 'keydown', 'touchstart']) {
      win.addEventListener(ev, onInteract);
    }
    this.detach.push(() => {
      win.removeEventListener('online', onOnline);
      for (const ev of ['pointerdown', 'keydown', 'touchstart']) {
        win.removeEventListener(ev, onInteract);
      }
    });
  }

  stop(): void {
    for (const fn of this.detach.splice(0)) fn();
    if (this.idleTimer !== null) clearTimeout(this.idleTimer);
    this.idleTimer = null;
  }

  sessionOpen(): boolean {
    return this.open;
  }

  interaction(): void {
    if (!this.open) {
      this.open = true;
      this.announce();
      // Resuming is also the moment to catch up on anything queued.
      if (this.isOnline() && this.store.pending().length > 0) {
        this.flush().catch(() => undefined);
      }
    }
    this.armIdleTimer();
  }

  private armIdleTimer(): void {
    if (this.idleTimer !== null) clearTimeout(this.idleTimer);
    this.idleTimer = setTimeout(() => {
      this.open = false;
      this.announce();
    }, this.idleMs);
  }

  private announce(): void {
    this.onState?.({
      pending: this.store.pending().length,
      sessionOpen: this.open,
    });
  }

  async submit(
    instanceId: string,
    data: Record<string, unknown>,
    submitUrl: string,
  ): Promise<SubmitOutcome> {
    this.interaction();
    if (this.isOnline()) {
      try {
        const res = await this.fetchFn(submitUrl, {
          method: 'POST',
          headers: { 'Content-Type': 'application/json' },
          body: JSON.stringify(data),
        });
        const body = await res.json().catch(() => ({}));
        if (res.ok) {
          return { kind: 'accepted', status: body.status ?? 'Completed' };
        }
        return { kind: 'rejected', status: res.status, detail: body.detail };
      } catch {
        // Connection reported online but the wire said otherwise:
        // treat it the same as offline capture.
      }
    }
    const item = this.store.enqueue(instanceId, data);
    this.store.applyResult(this.app, item);
    this.announce();
    return { kind: 'queued', seq: item.seq };
  }

  // Uploads the pending queue as one batch in sequence order.  Safe to
  // call repeatedly; concurrent calls share one round trip.
  flush(): Promise<SyncAck[]> {
    if (this.flushing) return this.flushing;
    this.flushing = this.flushOnce().finally(() => {
      this.flushing = null;
    });
    return this.flushing;
  }

  private async flushOnce(): Promise<SyncAck[]> {
    const items = this.store.pending();
    if (items.length === 0 || !this.isOnline()) return [];
    let response: SyncResponse;
    try {
      const res = await this.fetchFn(this.syncUrl, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ device_id: this.store.deviceId(), items }),
      });
      if (!res.ok) {
        this.onState?.({
          pending: items.length,
          sessionOpen: this.open,
          lastError: `sync failed with status ${res.status}`,
        });
        return [];
      }
      response = (await res.json()) as SyncResponse;
    } catch (err) {
      // Still offline in practice; the queue stays put for next time.
      this.onState?.({
        pending: items.length,
        sessionOpen: this.open,
        lastError: String(err),
      });
      return [];
    }
    const bySeq = new Map<number, SyncItem>(items.map((i) => [i.seq, i]));
    for (const ack of response.acks) {
      const item = bySeq.get(ack.seq);
      if (!item) continue;
      if (ACK_DONE.has(ack.status)) {
        this.store.prune([ack.seq]);
        this.store.settleTask(this.app, ack.instance_id);
      } else {
        // Rejected or NotFound: out of the queue, into plain sight.
        this.store.markFailed(item, ack.status, ack.detail);
        this.store.settleTask(this.app, ack.instance_id, ack.detail ?? ack.status);
      }
    }
    this.announce();
    return response.acks;
  }

  pendingCount(): number {
    return this.store.pending().length;
  }
}
