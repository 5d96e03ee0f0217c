// Dependency channel between the model and bound view elements.
//
// Keys are model paths or element ids.  A publish reaches every
// overlapping subscription exactly once; publishes raised while
// handlers run are queued and delivered afterwards, so no handler ever
// runs inside another.

type Handler = (path: string) => void;

function overlaps(sub: string, path: string): boolean {
  return sub === path || sub.startsWith(path + '.') || path.startsWith(sub + '.');
}

export class EventBus {
  private subs = new Map<string, Set<Handler>>();
  private queue: string[] = [];
  private draining = false;
  private errors: ((path: string, err: unknown) => void) | null = null;

  onError(fn: (path: string, err: unknown) => void): void {
    this.errors = fn;
  }

  subscribe(key: string, handler: Handler): () => void {
    let set = this.subs.get(key);
    if (!set) {
      set = new Set();
      this.subs.set(key, set);
    }
    set.add(handler);
    return () => {
      set.delete(handler);
      if (set.size === 0) this.subs.delete(key);
    };
  }

  publish(path: string): void {
    this.queue.push(path);
    if (this.draining) return;
    this.draining = true;
    try {
      while (this.queue.length > 0) {
        this.deliver(this.queue.shift() as string);
      }
    } finally {
      this.draining = false;
    }
  }

  private deliver(path: string): void {
    // Snapshot first: handlers added or removed mid-delivery wait for
    // the next publish.  A Set keeps a handler watching several
    // overlapping paths down to a single call.
    const hit = new Set<Handler>();
    for (const [key, handlers] of this.subs) {
      if (overlaps(key, path)) {
        for (const h of handlers) hit.add(h);
      }
    }
    for (const handler of hit) {
      try {
        handler(path);
      } catch (err) {
        // One broken handler must not starve the rest.
        if (this.errors) this.errors(path, err);
        else console.error('event handler failed for', path, err);
      }
    }
  }

  subscriberCount(key: string): number {
    return this.subs.get(key)?.size ?? 0;
  }
}
