// Device-side task list.
//
// There is no list endpoint to call: tasks accumulate here as the
// device encounters them (bootstraps, deep links), and the cached
// rows are what search and the list render from while offline.

import { Interp, Scope, text, truthy } from './interp';
import type { Value } from './interp';
import type { OfflineStore } from './store';
import type { AppPayload, InboxTask } from './types';

export interface InboxOptions {
  store: OfflineStore;
  app: string;
  payload: AppPayload;
  doc: Document;
  open: (task: InboxTask) => void;
}

export class TaskInbox {
  private container: Element | null = null;
  private keyword = '';

  constructor(private options: InboxOptions) {}

  tasks(): InboxTask[] {
    return this.options.store.getTasks(this.options.app);
  }

  // Runs the bundle's own search operation over the cached rows, so
  // offline search matches exactly what the compiled app would do
  // online.  Falls back to a name-substring scan when the bundle
  // ships no search operation.
  search(keyword: string): InboxTask[] {
    const tasks = this.tasks();
    if (!keyword) return tasks;
    const op = this.searchOpName();
    if (op) {
      const rows = tasks.map((t) => t.data as Value);
      const interp = new Interp({
        fetchData: () => rows,
        lookup: (path) =>
          path === 'service_url' ? this.options.payload.service_url : undefined,
        operations: this.options.payload.operations,
        entities: this.options.payload.entities,
      });
      const spec = this.options.payload.operations[op];
      const scope = new Scope();
      if (spec.params.length > 0) scope.declare(spec.params[0].name, keyword);
      const result = interp.run(spec.body, scope);
      if (Array.isArray(result)) {
        const matched = new Set(result as object[]);
        return tasks.filter((t) => matched.has(t.data));
      }
    }
    const needle = keyword.toLowerCase();
    return tasks.filter((t) => taskName(t).toLowerCase().includes(needle));
  }

  private searchOpName(): string | null {
    const ops = this.options.payload.operations;
    for (const name of Object.keys(ops)) {
      if (/search/i.test(name) && ops[name].body.length > 0) return name;
    }
    return null;
  }

  renderList(container: Element): void {
    this.container = container;
    const doc = this.options.doc;
    container.innerHTML =
      '<main class="screen inbox"><h1>Tasks</h1>' +
      '<input type="search" data-inbox-search placeholder="Search tasks">' +
      '<ul data-inbox-list></ul></main>';
    const input = container.querySelector('[data-inbox-search]') as HTMLInputElement;
    input.value = this.keyword;
    input.addEventListener('input', () => {
      this.keyword = input.value;
      this.renderRows();
    });
    void doc;
    this.renderRows();
  }

  refresh(): void {
    if (this.container) this.renderRows();
  }

  private renderRows(): void {
    if (!this.container) return;
    const list = this.container.querySelector('[data-inbox-list]');
    if (!list) return;
    const doc = this.options.doc;
    list.innerHTML = '';
    for (const task of this.search(this.keyword)) {
      const li = doc.createElement('li');
      li.className = 'inbox-row';
      li.setAttribute('data-instance', task.instance_id);

      const button = doc.createElement('button');
      button.type = 'button';
      button.className = 'inbox-open';
      button.textContent = taskName(task);
      button.addEventListener('click', () => this.options.open(task));
      li.appendChild(button);

      const chip = doc.createElement('span');
      const status = String(task.data['status'] ?? '');
      chip.className = 'chip ' + chipClass(status);
      chip.textContent = status || 'unknown';
      li.appendChild(chip);

      if (truthy(task.pending ?? null)) {
        const pending = doc.createElement('span');
        pending.className = 'chip pending';
        pending.textContent = 'pending sync';
        li.appendChild(pending);
      }
      if (task.error) {
        const err = doc.createElement('span');
        err.className = 'chip error';
        err.textContent = task.error;
        li.appendChild(err);
      }
      list.appendChild(li);
    }
  }
}

function taskName(task: InboxTask): string {
  const data = task.data;
  for (const key of ['task_name', 'taskname', 'name', 'title']) {
    if (typeof data[key] === 'string') return data[key] as string;
  }
  return text(data as Value) || task.instance_id;
}

function chipClass(status: string): string {
  const s = status.toLowerCase();
  if (s.includes('approve')) return 'status-done';
  if (s.includes('delay')) return 'status-deferred';
  if (s.includes('wait')) return 'status-waiting';
  return 'status-other';
}
