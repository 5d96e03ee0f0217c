// Interpreter for the descriptor trees a compiled bundle ships.
//
// The expression layer follows the server-side evaluator exactly; the
// shared vector file under tests/ keeps the two in lockstep.  Anything
// ill-formed evaluates to null, never a throw: a broken rule must not
// take the screen down with it.

import type { Expr, Stmt, OpSpec, PropSpec } from './types';

export type Value = unknown;
export type ContextMap = Record<string, Value>;

export function truthy(v: Value): boolean {
  if (v === null || v === undefined) return false;
  if (typeof v === 'boolean') return v;
  if (typeof v === 'number') return v !== 0;
  if (typeof v === 'string') return v.length > 0;
  return true;
}

export function text(v: Value): string {
  if (v === null || v === undefined) return '';
  if (typeof v === 'boolean') return v ? 'true' : 'false';
  if (Array.isArray(v)) return v.map(text).join(', ');
  if (typeof v === 'object') {
    // Display heuristic for records: first string field stands in for
    // the whole value (a task renders as its name).
    const rec = v as Record<string, Value>;
    for (const key of Object.keys(rec)) {
      if (typeof rec[key] === 'string') return rec[key] as string;
    }
    const keys = Object.keys(rec);
    return keys.length ? text(rec[keys[0]]) : '';
  }
  return String(v);
}

function equals(l: Value, r: Value): boolean {
  if (typeof l === 'boolean' || typeof r === 'boolean') return l === r;
  if (l === null || l === undefined || r === null || r === undefined) {
    return (l === null || l === undefined) && (r === null || r === undefined);
  }
  if (typeof l !== typeof r) return false;
  return l === r;
}

function bothNumbers(l: Value, r: Value): l is number {
  return typeof l === 'number' && typeof r === 'number';
}

function ordered(op: string, l: Value, r: Value): boolean {
  if (!bothNumbers(l, r)) return false;
  const rn = r as number;
  if (op === '<') return l < rn;
  if (op === '>') return l > rn;
  if (op === '<=') return l <= rn;
  return l >= rn;
}

// Lexical scope chain for operation bodies and handlers.  Walks go
// through the parent's methods so a subclass can root the chain in
// something other than a map (the renderer roots it in the model).
export class Scope {
  private vars = new Map<string, Value>();

  constructor(private parent: Scope | null = null) {}

  has(name: string): boolean {
    return this.vars.has(name) || (this.parent !== null && this.parent.has(name));
  }

  get(name: string): Value {
    if (this.vars.has(name)) return this.vars.get(name);
    return this.parent ? this.parent.get(name) : undefined;
  }

  // Assigns where the name is bound, declaring locally when nowhere is.
  set(name: string, value: Value): void {
    if (this.vars.has(name)) {
      this.vars.set(name, value);
      return;
    }
    if (this.parent && this.parent.has(name)) {
      this.parent.set(name, value);
      return;
    }
    this.vars.set(name, value);
  }

  declare(name: string, value: Value): void {
    this.vars.set(name, value);
  }

  child(): Scope {
    return new Scope(this);
  }
}

// Host services the interpreter reaches out to.  Everything is
// optional; a bare interpreter evaluates pure expressions over a
// context map, which is all rule conditions ever need.
export interface Hooks {
  // Resolve a bare name or dotted path that no scope binds: the model,
  // then a context snapshot.  Return undefined to decline.
  lookup?(path: string): Value;
  // Remote data source behind httpRequest and body-less remote ops.
  fetchData?(op: string, args: Value[]): Value;
  // The in-flight task operation: calling it submits a result instead
  // of executing anything.
  submitOp?: string | null;
  submit?(op: string, values: Record<string, Value>): void;
  pushScreen?(screen: string, args: Value[]): void;
  historyBack?(delta: number): void;
  entityData?(entity: string, args: Value[]): Record<string, Value> | null;
  operations?: Record<string, OpSpec>;
  entities?: Record<string, { props: PropSpec[] }>;
  // Writes whose root no scope binds land in the host model.
  assignModel?(path: string, value: Value): void;
  // Every member-path write announces itself, scope-rooted or not.
  notify?(path: string): void;
}

class ReturnSignal {
  constructor(public value: Value) {}
}

function isoDate(y: number, m: number, d: number): string {
  // Out-of-range month/day roll over, matching calendar arithmetic.
  const dt = new Date(Date.UTC(y, m - 1, 1));
  dt.setUTCDate(d);
  return dt.toISOString().slice(0, 10);
}

function datePart(v: Value, part: 0 | 1 | 2): number | null {
  const m = /^(\d{4})-(\d{2})-(\d{2})/.exec(String(v));
  if (!m) return null;
  return Number(m[1 + part]);
}

function flatten(e: Expr): string | null {
  const parts: string[] = [];
  let cur = e;
  while (cur.k === 'member') {
    parts.push(cur.name);
    cur = cur.obj;
  }
  if (cur.k !== 'name') return null;
  parts.push(cur.v);
  return parts.reverse().join('.');
}

export class Interp {
  collected: Value[] = [];

  constructor(private hooks: Hooks = {}) {}

  eval(e: Expr | null, scope: Scope): Value {
    if (e === null) return null;
    try {
      return this.evalInner(e, scope);
    } catch (err) {
      if (err instanceof ReturnSignal) throw err;
      return null;
    }
  }

  private evalInner(e: Expr, scope: Scope): Value {
    switch (e.k) {
      case 'str':
      case 'int':
      case 'bool':
        return e.v;
      case 'name': {
        if (scope.has(e.v)) return scope.get(e.v) ?? null;
        const v = this.hooks.lookup?.(e.v);
        return v === undefined ? null : v;
      }
      case 'member': {
        const path = flatten(e);
        if (path !== null) {
          const head = path.split('.', 1)[0];
          if (!scope.has(head)) {
            const v = this.hooks.lookup?.(path);
            if (v !== undefined) return v;
          }
        }
        const obj = this.eval(e.obj, scope);
        if (obj === null || obj === undefined) return null;
        if (typeof obj === 'object' && !Array.isArray(obj)) {
          const v = (obj as Record<string, Value>)[e.name];
          return v === undefined ? null : v;
        }
        return null;
      }
      case 'un': {
        const v = this.eval(e.e, scope);
        if (e.op === '!') return !truthy(v);
        return typeof v === 'number' ? -v : null;
      }
      case 'bin':
        return this.binop(e.op, e.l, e.r, scope);
      case 'call':
        return this.call(e.fn, e.args, scope);
      case 'new': {
        const args = e.args.map((a) => this.eval(a, scope));
        this.hooks.pushScreen?.(e.screen, args);
        return null;
      }
      case 'block':
        this.run(e.body, scope.child());
        return null;
    }
  }

  private binop(op: string, le: Expr, re: Expr, scope: Scope): Value {
    if (op === '&&') {
      if (!truthy(this.eval(le, scope))) return false;
      return truthy(this.eval(re, scope));
    }
    if (op === '||') {
      if (truthy(this.eval(le, scope))) return true;
      return truthy(this.eval(re, scope));
    }
    const l = this.eval(le, scope);
    const r = this.eval(re, scope);
    switch (op) {
      case '==':
        return equals(l, r);
      case '!=':
        return !equals(l, r);
      case '<':
      case '>':
      case '<=':
      case '>=':
        return ordered(op, l, r);
      case 'in':
        if (Array.isArray(r)) return r.some((x) => equals(l, x));
        if (typeof r === 'string') return r.includes(text(l));
        return false;
      case '+':
        if (typeof l === 'string' || typeof r === 'string') return text(l) + text(r);
        if (bothNumbers(l, r)) return l + (r as number);
        return null;
      case '-':
        return bothNumbers(l, r) ? l - (r as number) : null;
      case '*':
        return bothNumbers(l, r) ? l * (r as number) : null;
      case '%':
        // Floored remainder, so negative operands agree with the
        // server-side evaluator rather than the host language.
        if (bothNumbers(l, r) && r !== 0) {
          const rn = r as number;
          return ((l % rn) + rn) % rn;
        }
        return null;
    }
    return null;
  }

  private call(fn: Expr, argExprs: Expr[], scope: Scope): Value {
    const args = argExprs.map((a) => this.eval(a, scope));

    if (fn.k === 'name' && !scope.has(fn.v)) {
      switch (fn.v) {
        case 'exist':
          return args.length > 0 && args[0] !== null && args[0] !== undefined;
        case 'add':
          if (args.length > 0) this.collected.push(args[0]);
          return null;
        case 'select':
          return args.length > 0 ? (args[0] ?? null) : null;
        case 'navigate': {
          const first = argExprs[0];
          if (first && first.k === 'name') this.hooks.pushScreen?.(first.v, []);
          return null;
        }
        case 'httpRequest':
          return this.hooks.fetchData ? (this.hooks.fetchData(fn.v, args) ?? null) : null;
      }
      if (this.hooks.operations && this.hooks.operations[fn.v]) {
        return this.callOperation(fn.v, args);
      }
      return null;
    }

    if (fn.k === 'member') {
      const base = flatten(fn.obj);
      if (base === 'history' && (fn.name === 'go' || fn.name === 'back')) {
        const delta = typeof args[0] === 'number' ? (args[0] as number) : -1;
        this.hooks.historyBack?.(delta);
        return null;
      }
      if (base === 'DateTime' && fn.name === 'create' && args.length === 3) {
        const [y, m, d] = args;
        if (typeof y === 'number' && typeof m === 'number' && typeof d === 'number') {
          return isoDate(y, m, d);
        }
        return null;
      }
      if (fn.name === 'getYear' || fn.name === 'getMonth' || fn.name === 'getDate') {
        const recv = this.eval(fn.obj, scope);
        return datePart(recv, fn.name === 'getYear' ? 0 : fn.name === 'getMonth' ? 1 : 2);
      }
      if (
        fn.name.startsWith('from') &&
        base !== null &&
        this.hooks.entities &&
        this.hooks.entities[base]
      ) {
        const found = this.hooks.entityData?.(base, args);
        return found ?? this.entityDefaults(base);
      }
      if (this.hooks.operations && this.hooks.operations[fn.name]) {
        return this.callOperation(fn.name, args);
      }
    }
    return null;
  }

  entityDefaults(name: string): Record<string, Value> {
    const obj: Record<string, Value> = {};
    const spec = this.hooks.entities?.[name];
    if (spec) {
      for (const p of spec.props) {
        obj[p.name] = p.tags ? [] : p.default ?? null;
      }
    }
    return obj;
  }

  callOperation(name: string, args: Value[]): Value {
    const op = this.hooks.operations?.[name];
    if (!op) return null;
    if (this.hooks.submitOp === name) {
      const values: Record<string, Value> = {};
      op.params.forEach((p, i) => {
        values[p.name] = args[i] ?? null;
      });
      this.hooks.submit?.(name, values);
      return null;
    }
    if (op.body.length === 0) {
      // Declaration-only remote op: answer from the data source.
      return op.remote && this.hooks.fetchData ? (this.hooks.fetchData(name, args) ?? null) : null;
    }
    const scope = new Scope();
    op.params.forEach((p, i) => scope.declare(p.name, args[i] ?? null));
    const before = this.collected.length;
    try {
      this.run(op.body, scope.child());
    } catch (err) {
      if (err instanceof ReturnSignal) {
        this.collected.length = before;
        return err.value;
      }
      return null;
    }
    // No explicit return: anything add()ed is the result set.
    const gathered = this.collected.splice(before);
    return gathered.length > 0 ? gathered : null;
  }

  run(stmts: Stmt[], scope: Scope): void {
    for (const s of stmts) this.runStmt(s, scope);
  }

  private runStmt(s: Stmt, scope: Scope): void {
    switch (s.k) {
      case 'var':
        scope.declare(s.name, s.init ? this.eval(s.init, scope) : null);
        break;
      case 'assign': {
        const value = this.eval(s.value, scope);
        this.assign(s.target, value, scope);
        break;
      }
      case 'expr':
        this.eval(s.e, scope);
        break;
      case 'if': {
        for (const branch of s.branches) {
          if (truthy(this.eval(branch.cond, scope))) {
            this.run(branch.body, scope.child());
            return;
          }
        }
        if (s.else) this.run(s.else, scope.child());
        break;
      }
      case 'foreach': {
        let items = this.eval(s.iter, scope);
        if (!Array.isArray(items)) items = items === null || items === undefined ? [] : [items];
        for (const item of items as Value[]) {
          const inner = scope.child();
          inner.declare(s.var, item);
          this.run(s.body, inner);
        }
        break;
      }
      case 'return':
        throw new ReturnSignal(s.e ? this.eval(s.e, scope) : null);
    }
  }

  private assign(target: Expr, value: Value, scope: Scope): void {
    if (target.k === 'name') {
      if (!scope.has(target.v) && this.hooks.assignModel) {
        this.hooks.assignModel(target.v, value);
        return;
      }
      scope.set(target.v, value);
      return;
    }
    if (target.k === 'member') {
      const path = flatten(target);
      if (path !== null && this.hooks.assignModel) {
        const head = path.split('.', 1)[0];
        if (!scope.has(head)) {
          this.hooks.assignModel(path, value);
          return;
        }
      }
      const obj = this.eval(target.obj, scope);
      if (obj !== null && typeof obj === 'object' && !Array.isArray(obj)) {
        (obj as Record<string, Value>)[target.name] = value;
        if (path !== null) this.hooks.notify?.(path);
      }
    }
  }
}

// Rule conditions read nothing but the device context.
export function evaluateRule(expr: Expr, context: ContextMap): boolean {
  const interp = new Interp({
    lookup: (path) => (path in context ? context[path] : undefined),
  });
  return truthy(interp.eval(expr, new Scope()));
}
