// Screen hydration: turns compiled markup plus descriptor payload
// into live DOM.
//
// The compiled page carries anchors the compiler promises:
//   data-expr="eN"      text slot computed from an expression
//   data-foreach="id"   list container with a <template> row
//   data-widget-field   input surface of a declared widget
//   data-touch="names"  gesture root
// Binding entries address elements by id; rows stamped from a
// template get ":<row>" appended to stay unique.

import { Interp, Scope, truthy, text } from './interp';
import type { Value } from './interp';
import type { ContextSnapshot } from './context';
import { attachSwipe } from './gestures';
import type { AppPayload, Binding, RuleSpec, ScreenSpec, Stmt } from './types';

// What a frame needs from the app that mounts it.
export interface RenderHost {
  payload: AppPayload;
  interp: Interp;
  rootScope: Scope;
  snapshot(): ContextSnapshot;
  subscribe(path: string, fn: () => void): void; // host tracks disposal
  publishModel(path: string, value: Value): void;
  log(msg: string): void;
}

function byId(frame: Element, id: string): Element | null {
  for (const el of frame.querySelectorAll('[id]')) {
    if (el.getAttribute('id') === id) return el;
  }
  return null;
}

function inputValue(el: Element): Value {
  const input = el as HTMLInputElement;
  if (input.type === 'checkbox') return input.checked;
  if (input.type === 'number') return Number(input.value);
  return input.value;
}

export class Frame {
  private exprNodes: { node: Element; id: string; scope: Scope }[] = [];

  constructor(
    public readonly element: Element,
    public readonly screen: string,
    private spec: ScreenSpec,
    private host: RenderHost,
  ) {}

  hydrate(): void {
    this.stampRows();
    this.collectExprNodes(this.element, this.host.rootScope);
    this.renderExprs();
    for (const binding of this.spec.bindings) {
      const el = byId(this.element, binding.element);
      if (el) this.wireBinding(binding, el, this.host.rootScope);
    }
    this.wireWidgets();
    this.wireTouches();
    this.applyRules();
  }

  // -- expression slots ---------------------------------------------

  private collectExprNodes(root: Element, scope: Scope): void {
    for (const node of root.querySelectorAll('[data-expr]')) {
      // Template contents were stamped separately with a row scope.
      if (node.closest('template')) continue;
      if (this.exprNodes.some((e) => e.node === node)) continue;
      this.exprNodes.push({ node, id: node.getAttribute('data-expr') as string, scope });
    }
  }

  renderExprs(): void {
    for (const entry of this.exprNodes) {
      const descriptor = this.spec.exprs[entry.id];
      if (!descriptor) continue;
      entry.node.textContent = text(this.host.interp.eval(descriptor, entry.scope));
    }
  }

  // -- list rows ----------------------------------------------------

  private stampRows(): void {
    for (const fid of Object.keys(this.spec.foreach)) {
      const loop = this.spec.foreach[fid];
      const container = byId(this.element, fid);
      if (!container) continue;
      const template = container.querySelector('template') as HTMLTemplateElement | null;
      if (!template) continue;
      const iter = this.spec.exprs[loop.iter];
      let items = iter ? this.host.interp.eval(iter, this.host.rootScope) : [];
      if (!Array.isArray(items)) items = items === null || items === undefined ? [] : [items];
      (items as Value[]).forEach((item, row) => {
        const clone = template.content.cloneNode(true) as DocumentFragment;
        const rowScope = this.host.rootScope.child();
        rowScope.declare(loop.var, item);
        for (const el of clone.querySelectorAll('[id]')) {
          el.setAttribute('data-row', String(row));
          el.setAttribute('id', el.getAttribute('id') + ':' + row);
        }
        for (const node of clone.querySelectorAll('[data-expr]')) {
          this.exprNodes.push({
            node,
            id: node.getAttribute('data-expr') as string,
            scope: rowScope,
          });
        }
        for (const binding of this.spec.bindings) {
          const el = clone.querySelector(`[id="${binding.element}:${row}"]`);
          if (el) this.wireBinding(binding, el, rowScope);
        }
        container.appendChild(clone);
      });
    }
  }

  // -- bindings ------------------------------------------------------

  private wireBinding(binding: Binding, el: Element, scope: Scope): void {
    if (binding.model) {
      const path = binding.model;
      el.addEventListener(binding.event ?? 'input', () => {
        this.host.publishModel(path, inputValue(el));
      });
      const syncBack = () => {
        const v = this.host.interp.eval({ k: 'name', v: path }, scope);
        if (v === null || v === undefined) return;
        const input = el as HTMLInputElement;
        if (input.type === 'checkbox') input.checked = truthy(v);
        else input.value = String(v);
      };
      this.host.subscribe(path, syncBack);
      syncBack();
      return;
    }
    if (binding.event) {
      el.addEventListener(binding.event, (evt) => {
        evt.preventDefault?.();
        this.runHandler(binding.action, scope);
      });
    }
    for (const path of binding.watch) {
      this.host.subscribe(path, () => this.renderExprs());
    }
  }

  // A throwing handler is logged and contained; the screen lives on.
  runHandler(action: Stmt[], scope: Scope): void {
    try {
      this.host.interp.run(action, scope.child());
    } catch (err) {
      this.host.log(`handler failed on ${this.screen}: ${String(err)}`);
    }
    this.renderExprs();
  }

  // -- widgets -------------------------------------------------------

  private wireWidgets(): void {
    for (const field of this.element.querySelectorAll('[data-widget-field]')) {
      const widget = this.host.payload.widgets[field.getAttribute('data-widget-field') as string];
      if (!widget) continue;
      field.addEventListener('change', () => {
        const scope = this.host.rootScope.child();
        scope.declare('option', { value: inputValue(field) });
        this.runHandler(widget.behavior, scope);
      });
    }
  }

  // -- touch gestures ------------------------------------------------

  private wireTouches(): void {
    for (const root of this.element.querySelectorAll('[data-touch]')) {
      const names = (root.getAttribute('data-touch') || '').split(' ').filter(Boolean);
      attachSwipe(root, (direction) => {
        for (const name of names) {
          const touch = this.host.payload.touches[name];
          if (!touch || touch.kind !== 'swipe') continue;
          // Names like swipelefttoright carry the direction to match.
          if (name.includes('lefttoright') && direction !== 'right') continue;
          if (name.includes('righttoleft') && direction !== 'left') continue;
          this.runHandler(touch.action, this.host.rootScope);
        }
      });
    }
  }

  // -- context rules -------------------------------------------------

  // One snapshot drives the whole sweep; a resize mid-loop waits for
  // the next pass.
  applyRules(): void {
    if (this.spec.rules.length === 0) return;
    this.host.snapshot();
    for (const rule of this.spec.rules) {
      this.applyRule(rule);
    }
  }

  private applyRule(rule: RuleSpec): void {
    let winner: string | null = null;
    for (const clause of rule.clauses) {
      if (clause.cond === null || truthy(this.host.interp.eval(clause.cond, this.host.rootScope))) {
        winner = clause.branch;
        break;
      }
    }
    if (winner === null) winner = rule.else;
    const branches = rule.clauses.map((c) => c.branch);
    if (rule.else) branches.push(rule.else);
    for (const branch of branches) {
      const el = byId(this.element, branch) as HTMLElement | null;
      if (el) el.hidden = branch !== winner;
    }
  }
}
