// Device context feeding rule conditions.
//
// Values live under the same dotted keys the compiled conditions use.
// The snapshot is immutable; listeners get a fresh one after resize,
// orientation, or connectivity changes, so every rule evaluated in one
// sweep sees the same world.

import type { ContextMap } from './interp';

export type ContextSnapshot = Readonly<ContextMap>;

// Subset of window the tracker reads; tests pass a stand-in.
export interface WindowLike {
  innerWidth: number;
  innerHeight: number;
  navigator: { userAgent?: string; onLine?: boolean };
  addEventListener(type: string, fn: () => void): void;
  removeEventListener(type: string, fn: () => void): void;
}

export function snapshotOf(win: WindowLike): ContextSnapshot {
  const ua = win.navigator.userAgent || '';
  const os = /iPad|iPhone|iPod/.test(ua) ? 'iOS' : /Android/.test(ua) ? 'Android' : 'desktop';
  const w = win.innerWidth;
  const h = win.innerHeight;
  return Object.freeze({
    'screen.deviceos': os,
    'screen.devicetype': w < 760 ? 'phone' : 'tablet',
    'screen.device.orientation': w > h ? 'horizontal' : 'vertical',
    'screen.window.innerWidth': w,
    'screen.window.innerHeight': h,
    'network.online': win.navigator.onLine !== false,
  });
}

export const REFRESH_EVENTS = ['resize', 'orientationchange', 'online', 'offline'];

export class ContextTracker {
  private snap: ContextSnapshot;
  private listeners = new Set<(ctx: ContextSnapshot) => void>();
  private refresh = () => {
    this.snap = snapshotOf(this.win);
    for (const fn of [...this.listeners]) fn(this.snap);
  };

  constructor(private win: WindowLike) {
    this.snap = snapshotOf(win);
    for (const ev of REFRESH_EVENTS) win.addEventListener(ev, this.refresh);
  }

  current(): ContextSnapshot {
    return this.snap;
  }

  subscribe(fn: (ctx: ContextSnapshot) => void): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  dispose(): void {
    for (const ev of REFRESH_EVENTS) this.win.removeEventListener(ev, this.refresh);
    this.listeners.clear();
  }
}
