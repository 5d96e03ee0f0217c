// Binding soundness: after any random sequence of model writes,
// input edits, and handler runs, every rendered slot and every bound
// input agrees with the model.  A reference object updated in
// parallel supplies the expected values.

import { describe, expect, it } from 'vitest';
import { Model, ModelScope } from '../src/app';
import { EventBus } from '../src/event-bus';
import { Interp } from '../src/interp';
import { Frame } from '../src/render';
import type { RenderHost } from '../src/render';
import { snapshotOf } from '../src/context';
import type { AppPayload, Expr, ScreenSpec } from '../src/types';
import { FakeWindow, mulberry32, pick, randInt } from './helpers';

const name = (v: string): Expr => ({ k: 'name', v });
const num = (v: number): Expr => ({ k: 'int', v });
const str = (v: string): Expr => ({ k: 'str', v });

const SPEC: ScreenSpec = {
  bindings: [
    { action: [], element: 'f0', event: 'input', model: 'note', targets: [], watch: [] },
    { action: [], element: 'f1', event: 'input', model: 'count', targets: [], watch: [] },
    { action: [], element: 'f2', event: 'change', model: 'flags.on', targets: [], watch: [] },
    { action: [], element: 'f0', event: null, targets: [], watch: ['note', 'count', 'flags'] },
    {
      action: [{ k: 'return', e: null }],
      element: 'b0',
      event: 'click',
      targets: [],
      watch: [],
    },
    {
      action: [
        { k: 'assign', target: name('note'), value: { k: 'bin', op: '+', l: name('note'), r: str('x') } },
      ],
      element: 'b1',
      event: 'click',
      targets: [],
      watch: [],
    },
  ],
  cached: true,
  exprs: {
    x0: name('note'),
    x1: { k: 'bin', op: '+', l: name('count'), r: num(1) },
    x2: { k: 'member', obj: name('flags'), name: 'on' },
    x3: { k: 'bin', op: '+', l: str('n='), r: name('note') },
    r0: name('row'),
    rIter: name('rows'),
  },
  foreach: { list0: { iter: 'rIter', var: 'row' } },
  params: [],
  path: 'screens/form.html',
  rules: [],
  setup: [],
  touches: [],
  widgets: [],
};

const MARKUP =
  '<main class="screen">' +
  '<span data-expr="x0"></span><span data-expr="x1"></span>' +
  '<span data-expr="x2"></span><span data-expr="x3"></span>' +
  '<input id="f0"><input id="f1" type="number"><input id="f2" type="checkbox">' +
  '<button id="b0">boom</button><button id="b1">grow</button>' +
  '<ul id="list0" data-foreach="list0"><template><li id="list0-0">' +
  '<span data-expr="r0"></span></li></template></ul>' +
  '</main>';

function payloadWith(spec: ScreenSpec): AppPayload {
  return {
    app: 'synthetic',
    deep_link_template: '',
    entities: {},
    entry: 'form',
    navigation: { edges: [], nodes: ['form'] },
    operations: {},
    screens: { form: spec },
    service_url: '',
    touches: {},
    vars: {},
    widgets: {},
  };
}

interface Mounted {
  el: Element;
  model: Model;
  logs: string[];
  dispose: () => void;
}

function mount(): Mounted {
  const bus = new EventBus();
  const model = new Model(bus);
  model.data = { note: 'start', count: 0, flags: { on: false }, rows: ['r1', 'r2', 'r3'] };
  const logs: string[] = [];
  const disposers: Array<() => void> = [];
  const win = new FakeWindow();
  const interp = new Interp({
    lookup: (p) => model.get(p),
    assignModel: (p, v) => model.set(p, v),
    notify: (p) => bus.publish(p),
  });
  const host: RenderHost = {
    payload: payloadWith(SPEC),
    interp,
    rootScope: new ModelScope(model),
    snapshot: () => snapshotOf(win),
    subscribe: (path, fn) => disposers.push(bus.subscribe(path, fn)),
    publishModel: (path, v) => model.set(path, v),
    log: (m) => logs.push(m),
  };
  const el = document.createElement('div');
  el.innerHTML = MARKUP;
  new Frame(el, 'form', SPEC, host).hydrate();
  return { el, model, logs, dispose: () => disposers.splice(0).forEach((fn) => fn()) };
}

interface Ref {
  note: string;
  count: number;
  on: boolean;
}

function checkConsistent(m: Mounted, ref: Ref): void {
  const q = (sel: string) => m.el.querySelector(sel) as HTMLElement;
  expect(q('[data-expr="x0"]').textContent).toBe(ref.note);
  expect(q('[data-expr="x1"]').textContent).toBe(String(ref.count + 1));
  expect(q('[data-expr="x2"]').textContent).toBe(ref.on ? 'true' : 'false');
  expect(q('[data-expr="x3"]').textContent).toBe('n=' + ref.note);
  expect((q('#f0') as HTMLInputElement).value).toBe(ref.note);
  expect((q('#f1') as HTMLInputElement).value).toBe(String(ref.count));
  expect((q('#f2') as HTMLInputElement).checked).toBe(ref.on);
}

describe('binding soundness properties', () => {
  it('stamps list rows from the template with row scopes', () => {
    const m = mount();
    const rows = [...m.el.querySelectorAll('li')].map((li) => li.textContent);
    expect(rows).toEqual(['r1', 'r2', 'r3']);
    const ids = [...m.el.querySelectorAll('li')].map((li) => li.getAttribute('id'));
    expect(ids).toEqual(['list0-0:0', 'list0-0:1', 'list0-0:2']);
    m.dispose();
  });

  it('keeps view and model agreeing across 1000 random event sequences', () => {
    for (let seed = 0; seed < 1000; seed++) {
      const rand = mulberry32(seed + 31);
      const m = mount();
      const ref: Ref = { note: 'start', count: 0, on: false };
      checkConsistent(m, ref);

      const input = (id: string) => m.el.querySelector(`#${id}`) as HTMLInputElement;
      const steps = 1 + randInt(rand, 8);
      for (let i = 0; i < steps; i++) {
        switch (randInt(rand, 7)) {
          case 0: {
            const v = rand() < 0.15 ? '' : 's' + randInt(rand, 1000);
            m.model.set('note', v);
            ref.note = v;
            break;
          }
          case 1: {
            const v = randInt(rand, 1000);
            m.model.set('count', v);
            ref.count = v;
            break;
          }
          case 2: {
            const v = rand() < 0.5;
            m.model.set('flags.on', v);
            ref.on = v;
            break;
          }
          case 3: {
            const v = 'typed' + randInt(rand, 1000);
            input('f0').value = v;
            input('f0').dispatchEvent(new Event('input', { bubbles: true }));
            ref.note = v;
            break;
          }
          case 4: {
            const v = randInt(rand, 1000);
            input('f1').value = String(v);
            input('f1').dispatchEvent(new Event('input', { bubbles: true }));
            ref.count = v;
            break;
          }
          case 5: {
            const box = input('f2');
            box.checked = !box.checked;
            box.dispatchEvent(new Event('change', { bubbles: true }));
            ref.on = box.checked;
            break;
          }
          case 6: {
            const before = m.logs.length;
            (m.el.querySelector('#b0') as HTMLElement).dispatchEvent(
              new Event('click', { bubbles: true }),
            );
            // The throwing handler is contained and reported.
            expect(m.logs.length).toBe(before + 1);
            expect(m.logs[before]).toContain('handler failed');
            break;
          }
        }
        checkConsistent(m, ref);
      }

      // A model-writing handler still lands through the same bus.
      (m.el.querySelector('#b1') as HTMLElement).dispatchEvent(
        new Event('click', { bubbles: true }),
      );
      ref.note = ref.note + 'x';
      checkConsistent(m, ref);
      m.dispose();
    }
  });

  it('random interleavings of handler failures never wedge delivery', () => {
    const m = mount();
    const ref: Ref = { note: 'start', count: 0, on: false };
    const rand = mulberry32(77);
    for (let i = 0; i < 200; i++) {
      if (rand() < 0.3) {
        (m.el.querySelector('#b0') as HTMLElement).dispatchEvent(
          new Event('click', { bubbles: true }),
        );
      }
      const v = 'v' + i;
      m.model.set('note', v);
      ref.note = v;
      checkConsistent(m, ref);
    }
    expect(m.logs.length).toBeGreaterThan(0);
    m.dispose();
  });
});
