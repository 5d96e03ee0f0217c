// Boot and runtime wiring for a compiled task bundle.
//
// Owns the model, the screen stack, the durable store and the sync
// engine, and mounts screens through the renderer.  Everything the
// server is asked for goes through the bundle manifest or the task
// HTTP endpoints; everything remembered on the device goes through
// the versioned store.

import { ContextTracker, snapshotOf } from './context';
import type { ContextSnapshot, WindowLike } from './context';
import { EventBus } from './event-bus';
import { Interp, Scope, text } from './interp';
import type { Value } from './interp';
import { Frame } from './render';
import type { RenderHost } from './render';
import { ScreenStack } from './screen-stack';
import { OfflineStore, sha256Hex } from './store';
import type { StorageLike } from './store';
import { SyncEngine } from './sync-engine';
import type { FetchLike, SyncState } from './sync-engine';
import { TaskInbox } from './inbox';
import type {
  AppPayload,
  Bootstrap,
  InboxTask,
  Manifest,
  ManifestScreen,
  ScreenSpec,
} from './types';

// Above this width a pushed detail keeps its parent visible and
// renders as a cascading overlay.
export const CASCADE_MIN_WIDTH = 500;

export interface AppWindow extends WindowLike {
  document: Document;
  setTimeout?: unknown;
}

export interface BootOptions {
  root: Element;
  win: AppWindow;
  storage: StorageLike;
  fetchFn?: FetchLike;
  manifest?: Manifest;
  manifestUrl?: string;
  bootstrap?: Bootstrap | null;
  // Offline relaunch with nothing in hand: which cached app to wake.
  app?: string;
  idleMs?: number;
  log?: (msg: string) => void;
  onSyncState?: (state: SyncState) => void;
}

interface FrameEntry {
  screen: string;
  args: Value[];
  frame: Frame | null;
}

// The payload travels inside app.js as a single assignment line.
export function extractPayload(appJs: string): AppPayload | null {
  for (const line of appJs.split('\n')) {
    if (line.startsWith('window.MUIT_APP = ')) {
      try {
        return JSON.parse(line.slice('window.MUIT_APP = '.length).replace(/;$/, ''));
      } catch {
        return null;
      }
    }
  }
  return null;
}

// Local echo of what the engine will record for the approval family,
// so the screen can show the outcome before (or without) the wire.
export function localOutcome(
  op: string | null,
  values: Record<string, Value>,
  taskData: Record<string, unknown>,
): Record<string, Value> {
  if (op === 'approveTask') return { status: 'approved' };
  if (op === 'delayTask') {
    const out: Record<string, Value> = { status: 'delay' };
    const due = taskData['dueDate'];
    const days = typeof values['days'] === 'number' ? (values['days'] as number) : 0;
    if (typeof due === 'string' && /^\d{4}-\d{2}-\d{2}/.test(due)) {
      const dt = new Date(due.slice(0, 10) + 'T00:00:00Z');
      dt.setUTCDate(dt.getUTCDate() + days);
      out['dueDate'] = dt.toISOString().slice(0, 10);
    }
    return out;
  }
  return {};
}

export class Model {
  data: Record<string, Value> = {};

  constructor(private bus: EventBus) {}

  has(name: string): boolean {
    return name in this.data;
  }

  get(path: string): Value {
    let v: Value = this.data;
    for (const part of path.split('.')) {
      if (v === null || v === undefined || typeof v !== 'object') return undefined;
      v = (v as Record<string, Value>)[part];
    }
    return v;
  }

  set(path: string, value: Value): void {
    const parts = path.split('.');
    if (parts.length === 1) {
      this.data[path] = value;
    } else {
      const parent = this.get(parts.slice(0, -1).join('.'));
      if (parent === null || parent === undefined || typeof parent !== 'object') return;
      (parent as Record<string, Value>)[parts[parts.length - 1]] = value;
    }
    this.bus.publish(path);
  }
}

// Root of every scope chain: free names live on the shared model.
export class ModelScope extends Scope {
  constructor(private model: Model) {
    super(null);
  }

  has(name: string): boolean {
    return this.model.has(name);
  }

  get(name: string): Value {
    return this.model.has(name) ? this.model.data[name] : undefined;
  }

  set(name: string, value: Value): void {
    this.model.set(name, value);
  }

  declare(name: string, value: Value): void {
    this.model.set(name, value);
  }
}

export type DeepLinkResult =
  | { kind: 'detail'; instance: string; screen: string }
  | { kind: 'completed'; instance: string }
  | { kind: 'unknown'; reason: string };

export class App implements RenderHost {
  state: 'ready' | 'error' = 'ready';
  manifest!: Manifest;
  payload!: AppPayload;
  model: Model;
  bus: EventBus;
  stack = new ScreenStack();
  store: OfflineStore;
  sync!: SyncEngine;
  inbox!: TaskInbox;
  interp!: Interp;
  rootScope!: Scope;
  bootstrap: Bootstrap | null;

  private frames: FrameEntry[] = [];
  private tracker: ContextTracker;
  private snap: ContextSnapshot;
  private disposers: Array<() => void> = [];
  private frameDisposers: Array<() => void> = [];
  private fetchFn: FetchLike;
  private root: Element;
  private win: AppWindow;
  readonly log: (msg: string) => void;

  constructor(private options: BootOptions) {
    this.root = options.root;
    this.win = options.win;
    this.fetchFn = options.fetchFn ?? ((url, init) => fetch(url, init));
    this.log = options.log ?? ((msg) => console.warn(msg));
    this.bus = new EventBus();
    this.bus.onError((path, err) => this.log(`subscriber failed for ${path}: ${String(err)}`));
    this.model = new Model(this.bus);
    this.store = new OfflineStore(options.storage);
    this.bootstrap = options.bootstrap ?? null;
    this.tracker = new ContextTracker(options.win);
    this.snap = this.tracker.current();
  }

  online(): boolean {
    return this.win.navigator.onLine !== false;
  }

  // ---- boot --------------------------------------------------------

  async start(): Promise<this> {
    const manifest = await this.resolveManifest();
    if (!manifest) {
      this.renderOfflineError('nothing cached for this app yet');
      return this;
    }
    this.manifest = manifest;
    await this.cacheAssets();

    const payload = await this.loadPayload();
    this.payload = payload ?? emptyPayload(manifest);
    this.buildInterp();

    if (this.bootstrap) {
      this.rememberTask({
        instance_id: this.bootstrap.instance,
        op: this.bootstrap.op ?? '',
        data: { ...this.bootstrap.data },
      });
    }

    this.sync = new SyncEngine({
      store: this.store,
      app: this.manifest.app,
      fetchFn: this.fetchFn,
      online: () => this.online(),
      idleMs: this.options.idleMs,
      onState: this.options.onSyncState,
    });
    this.sync.start(this.win as any);
    this.inbox = new TaskInbox({
      store: this.store,
      app: this.manifest.app,
      payload: this.payload,
      doc: this.win.document,
      open: (task) => this.openTask(task),
    });

    // Module variables seed the model before any screen runs.
    for (const name of Object.keys(this.payload.vars)) {
      const init = this.payload.vars[name];
      this.model.data[name] = init ? this.interp.eval(init, new Scope()) : null;
    }

    this.disposers.push(this.tracker.subscribe(() => this.applyContextRules()));
    this.stack.boot(this.manifest.entry);
    this.frames = [{ screen: this.manifest.entry, args: [], frame: null }];
    this.renderAll();
    this.state = 'ready';
    return this;
  }

  private async resolveManifest(): Promise<Manifest | null> {
    if (this.options.manifest) {
      this.store.putManifest(this.options.manifest);
      return this.options.manifest;
    }
    if (this.options.manifestUrl && this.online()) {
      try {
        const res = await this.fetchFn(this.options.manifestUrl);
        if (res.ok) {
          const manifest = (await res.json()) as Manifest;
          this.store.putManifest(manifest);
          return manifest;
        }
      } catch {
        // fall through to cache
      }
    }
    const app = this.options.app ?? this.store.lastApp();
    return app ? this.store.getManifest(app) : null;
  }

  // First online load persists every asset the manifest marks
  // cacheable, verifying content against the manifest hash.  A
  // mismatch gets one refetch before giving up on that asset.
  private async cacheAssets(): Promise<void> {
    if (!this.online()) return;
    for (const path of this.manifest.cache_assets) {
      const hash = this.manifest.assets[path];
      if (!hash || this.store.hasAsset(hash)) continue;
      let stored = false;
      for (let attempt = 0; attempt < 2 && !stored; attempt++) {
        const content = await this.fetchAsset(path);
        if (content === null) break;
        const digest = await sha256Hex(content);
        if ('sha256:' + digest === hash) {
          this.store.putAsset(hash, content);
          stored = true;
        }
      }
      if (!stored) this.log(`asset ${path} failed hash verification`);
    }
  }

  private async fetchAsset(path: string): Promise<string | null> {
    try {
      const res = await this.fetchFn(`/bundle/${this.manifest.app}/${path}`);
      if (!res.ok) return null;
      return await (res as any).text();
    } catch {
      return null;
    }
  }

  private async assetText(path: string): Promise<string | null> {
    const hash = this.manifest.assets[path];
    if (hash) {
      const cached = this.store.getAsset(hash);
      if (cached !== null) return cached;
    }
    if (!this.online()) return null;
    const content = await this.fetchAsset(path);
    if (content !== null && hash && this.manifest.cache_assets.includes(path)) {
      if ('sha256:' + (await sha256Hex(content)) === hash) this.store.putAsset(hash, content);
    }
    return content;
  }

  private async loadPayload(): Promise<AppPayload | null> {
    const js = await this.assetText('app.js');
    return js === null ? null : extractPayload(js);
  }

  private buildInterp(): void {
    this.rootScope = new ModelScope(this.model);
    this.interp = new Interp({
      lookup: (path) => this.lookup(path),
      fetchData: () => this.taskData(),
      submitOp: this.bootstrap?.op ?? null,
      submit: (op, values) => {
        void this.submitResult(op, values);
      },
      pushScreen: (screen, args) => this.push(screen, args),
      historyBack: () => this.back(),
      entityData: () => this.seedFromBootstrap(),
      operations: this.payload.operations,
      entities: this.payload.entities,
      assignModel: (path, value) => this.model.set(path, value),
      notify: (path) => this.bus.publish(path),
    });
  }

  private lookup(path: string): Value {
    const fromModel = this.model.get(path);
    if (fromModel !== undefined) return fromModel;
    const head = path.split('.', 1)[0];
    if (this.payload.widgets[head]) {
      // Widget members live on the shared model.
      const rest = path.slice(head.length + 1);
      return rest ? this.model.get(rest) ?? null : null;
    }
    if (path in this.snap) return this.snap[path];
    return undefined;
  }

  // The data rows behind remote list operations: everything this
  // device has cached, else whatever the task bootstrap carried.
  private taskData(): Value {
    const tasks = this.store.getTasks(this.manifest.app);
    if (tasks.length > 0) return tasks.map((t) => t.data);
    const data = this.bootstrap?.data;
    if (Array.isArray(data)) return data;
    if (data && typeof data === 'object') {
      for (const key of Object.keys(data)) {
        if (Array.isArray((data as Record<string, unknown>)[key])) {
          return (data as Record<string, unknown>)[key];
        }
      }
      return [data];
    }
    return [];
  }

  private seedFromBootstrap(): Record<string, Value> | null {
    const data = this.bootstrap?.data;
    if (data && typeof data === 'object' && !Array.isArray(data)) {
      return { ...(data as Record<string, Value>) };
    }
    return null;
  }

  private rememberTask(task: InboxTask): void {
    const tasks = this.store.getTasks(this.manifest.app);
    const existing = tasks.find((t) => t.instance_id === task.instance_id);
    if (existing) {
      Object.assign(existing.data, task.data);
      existing.op = task.op || existing.op;
    } else {
      tasks.push(task);
    }
    this.store.putTasks(this.manifest.app, tasks);
  }

  // ---- navigation --------------------------------------------------

  visible(): string {
    return this.stack.top();
  }

  push(screen: string, args: Value[] = []): void {
    if (!this.screenSpec(screen)) {
      this.log(`unknown screen ${screen}`);
      return;
    }
    this.stack.push(screen);
    this.frames.push({ screen, args, frame: null });
    this.renderAll();
  }

  back(): void {
    if (!this.stack.pop()) return;
    this.frames.pop();
    this.renderAll();
  }

  private screenSpec(name: string): ManifestScreen | undefined {
    return this.manifest.screens.find((s) => s.name === name);
  }

  // ---- rendering ---------------------------------------------------

  snapshot(): ContextSnapshot {
    this.snap = this.tracker.current();
    return this.snap;
  }

  subscribe(path: string, fn: () => void): void {
    this.frameDisposers.push(this.bus.subscribe(path, fn));
  }

  publishModel(path: string, value: Value): void {
    this.model.set(path, value);
  }

  private cascade(): boolean {
    return (this.snap['screen.window.innerWidth'] as number) > CASCADE_MIN_WIDTH;
  }

  private renderAll(): void {
    for (const dispose of this.frameDisposers.splice(0)) dispose();
    this.root.innerHTML = '';
    this.snapshot();
    // Narrow screens show only the top; wide screens keep the chain
    // mounted and float newer frames as cascading overlays.
    const mounted = this.cascade() ? this.frames : this.frames.slice(-1);
    void this.mountFrames(mounted);
  }

  private async mountFrames(entries: FrameEntry[]): Promise<void> {
    for (let i = 0; i < entries.length; i++) {
      await this.mountFrame(entries[i], i > 0);
    }
  }

  private async mountFrame(entry: FrameEntry, overlay: boolean): Promise<void> {
    const doc = this.win.document;
    const section = doc.createElement('section');
    section.className = overlay ? 'screen-frame cascade' : 'screen-frame';
    section.setAttribute('data-screen', entry.screen);
    this.root.appendChild(section);

    const spec = this.payload.screens[entry.screen];
    const screen = this.screenSpec(entry.screen);
    const html = screen ? await this.assetText(screen.path) : null;
    if (!spec || html === null) {
      // No markup reachable: the built-in inbox stands in for the
      // task list; anything else reports the gap.
      if (entry.screen === this.manifest.entry) {
        this.inbox.renderList(section);
      } else {
        section.innerHTML = offlinePanel(entry.screen);
      }
      return;
    }

    const ParserCtor: typeof DOMParser = (this.win as any).DOMParser ?? DOMParser;
    const parsed = new ParserCtor().parseFromString(html, 'text/html');
    const main = parsed.querySelector('main') ?? parsed.body;
    section.appendChild(doc.importNode(main, true));

    this.bindScreenParams(entry, spec);
    const frame = new Frame(section, entry.screen, spec, this);
    entry.frame = frame;
    this.interp.run(spec.setup, this.rootScope);
    frame.hydrate();
  }

  private bindScreenParams(entry: FrameEntry, spec: ScreenSpec): void {
    if (spec.params.length === 0) return;
    const name = spec.params[0].name;
    let value = entry.args[0];
    if (value === undefined && this.bootstrap) value = this.bootstrap.data;
    if (value !== undefined) this.model.data[name] = value;
    for (let i = 1; i < spec.params.length; i++) {
      if (entry.args[i] !== undefined) this.model.data[spec.params[i].name] = entry.args[i];
    }
  }

  applyContextRules(): void {
    const wasCascade = this.cascade();
    this.snapshot();
    if (this.cascade() !== wasCascade) {
      this.renderAll();
      return;
    }
    for (const entry of this.frames) {
      entry.frame?.applyRules();
    }
  }

  // ---- results -----------------------------------------------------

  async submitResult(op: string, values: Record<string, Value>): Promise<void> {
    const task = this.currentTask();
    const outcome = localOutcome(op, values, task?.data ?? {});
    const data: Record<string, Value> = { ...values, ...outcome };
    const instance = task?.instance_id ?? this.bootstrap?.instance;
    if (!instance) {
      this.log(`no task instance to submit ${op} against`);
      return;
    }
    const submitUrl = this.bootstrap?.submit_url ?? `/task/${instance}/result`;
    const result = await this.sync.submit(instance, data, submitUrl);
    this.root.setAttribute('data-submitted', op);

    // Reflect the outcome locally so bound fields re-render.  The
    // queued branch was already captured into the cache by the sync
    // engine; an accepted post settles immediately.
    if (task) {
      Object.assign(task.data, outcome);
      this.rememberTask(task);
      if (result.kind === 'accepted') {
        this.store.settleTask(this.manifest.app, instance);
      }
    }
    this.mergeOutcomeIntoModel(outcome);
    if (result.kind === 'rejected') {
      this.log(`submit of ${op} rejected (${result.status}): ${result.detail ?? ''}`);
    }
  }

  private currentTask(): InboxTask | null {
    const top = this.frames[this.frames.length - 1];
    const spec = top ? this.payload.screens[top.screen] : undefined;
    if (spec && spec.params.length > 0) {
      const bound = this.model.data[spec.params[0].name];
      if (bound && typeof bound === 'object') {
        const tasks = this.store.getTasks(this.manifest.app);
        const match = tasks.find(
          (t) => t.data === bound || sameTask(t.data, bound as Record<string, unknown>),
        );
        if (match) return match;
      }
    }
    if (this.bootstrap) {
      const tasks = this.store.getTasks(this.manifest.app);
      return tasks.find((t) => t.instance_id === this.bootstrap?.instance) ?? null;
    }
    return null;
  }

  private mergeOutcomeIntoModel(outcome: Record<string, Value>): void {
    const top = this.frames[this.frames.length - 1];
    const spec = top ? this.payload.screens[top.screen] : undefined;
    if (!spec || spec.params.length === 0) return;
    const name = spec.params[0].name;
    const bound = this.model.data[name];
    if (bound && typeof bound === 'object' && !Array.isArray(bound)) {
      for (const key of Object.keys(outcome)) {
        (bound as Record<string, Value>)[key] = outcome[key];
        this.bus.publish(`${name}.${key}`);
      }
    }
  }

  // ---- tasks and deep links ---------------------------------------

  openTask(task: InboxTask): void {
    const detail = this.detailScreen();
    if (!detail) {
      this.log('bundle has no detail screen to open');
      return;
    }
    this.bootstrap = {
      instance: task.instance_id,
      op: task.op || this.bootstrap?.op || null,
      state: 'open',
      data: task.data,
      submit_url: `/task/${task.instance_id}/result`,
      service: this.manifest.app,
    };
    this.buildInterp();
    this.push(detail, [task.data]);
  }

  private detailScreen(): string | null {
    const edge = this.manifest.navigation.edges.find(
      (e) => e.kind === 'push' && e.from === this.manifest.entry,
    );
    if (edge) return edge.to;
    const other = this.manifest.screens.find((s) => s.name !== this.manifest.entry);
    return other ? other.name : null;
  }

  async openDeepLink(url: string): Promise<DeepLinkResult> {
    const match = /\/task\/([^/]+)\/ui(?:#(.+))?$/.exec(url);
    if (!match) return { kind: 'unknown', reason: 'not a task link' };
    const [, instance, fragment] = match;

    if (this.online()) {
      try {
        const res = await this.fetchFn(`/task/${instance}/ui`);
        if (res.status === 410) {
          this.renderCompleted(instance);
          return { kind: 'completed', instance };
        }
        if (!res.ok) {
          this.log(`deep link to ${instance} answered ${res.status}`);
          return { kind: 'unknown', reason: `status ${res.status}` };
        }
        const html = await (res as any).text();
        const boot = extractBootstrap(html);
        if (boot) {
          this.bootstrap = boot;
          this.buildInterp();
          this.rememberTask({
            instance_id: boot.instance,
            op: boot.op ?? '',
            data: { ...boot.data },
          });
        }
      } catch {
        // offline after all; use the cache below
      }
    }

    const cached = this.store
      .getTasks(this.manifest.app)
      .find((t) => t.instance_id === instance);
    if (!cached && !this.bootstrap) {
      return { kind: 'unknown', reason: 'task not cached' };
    }
    const screen =
      fragment && this.screenSpec(fragment) ? fragment : this.detailScreen() ?? this.manifest.entry;
    const data = cached?.data ?? this.bootstrap?.data ?? {};
    this.push(screen, [data]);
    return { kind: 'detail', instance, screen };
  }

  // ---- terminal screens -------------------------------------------

  private renderOfflineError(reason: string): void {
    this.state = 'error';
    this.root.innerHTML =
      '<section class="screen-frame" data-screen="offline-error">' +
      '<main class="screen"><h1>Offline</h1>' +
      `<p>This app cannot start without a connection: ${escapeHtml(reason)}.</p>` +
      '</main></section>';
  }

  renderCompleted(instance: string): void {
    const tasks = this.store.getTasks(this.manifest.app);
    const task = tasks.find((t) => t.instance_id === instance);
    const label = task ? text(task.data) : instance;
    this.root.innerHTML =
      '<section class="screen-frame" data-screen="task-completed">' +
      '<main class="screen"><h1>Task completed</h1>' +
      `<p>${escapeHtml(label)} is already finished; there is nothing left to do here.</p>` +
      '</main></section>';
  }

  dispose(): void {
    for (const fn of this.frameDisposers.splice(0)) fn();
    for (const fn of this.disposers.splice(0)) fn();
    this.sync?.stop();
    this.tracker.dispose();
  }
}

function sameTask(a: Record<string, unknown>, b: Record<string, unknown>): boolean {
  // Entities have no identity on the wire; the name field is the key.
  for (const key of ['task_name', 'taskname', 'name']) {
    if (key in a || key in b) return a[key] === b[key];
  }
  return false;
}

function extractBootstrap(html: string): Bootstrap | null {
  const match = /window\.MUIT_BOOTSTRAP = (\{.*?\});/.exec(html);
  if (!match) return null;
  try {
    return JSON.parse(match[1].replace(/<\\\//g, '</')) as Bootstrap;
  } catch {
    return null;
  }
}

function emptyPayload(manifest: Manifest): AppPayload {
  return {
    app: manifest.app,
    deep_link_template: manifest.deep_link_template,
    entities: {},
    entry: manifest.entry,
    navigation: manifest.navigation,
    operations: {},
    screens: {},
    service_url: manifest.service_url,
    touches: {},
    vars: {},
    widgets: {},
  };
}

function offlinePanel(screen: string): string {
  return (
    '<main class="screen"><h1>Not available offline</h1>' +
    `<p>The screen ${escapeHtml(screen)} has not been cached on this device.</p></main>`
  );
}

function escapeHtml(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export async function boot(options: BootOptions): Promise<App> {
  return new App(options).start();
}

export { snapshotOf };
