"""The vanilla-JS bootstrap embedded in every bundle's app.js.

It interprets the descriptor payload (window.MUIT_APP) well enough to
make a served page interactive on its own: context rules, data
binding, list hydration, swipe-back, and result submission against an
engine-injected window.MUIT_BOOTSTRAP.  A richer runtime can replace
it; the payload is the contract, this script is the floor.
"""

RUNTIME_JS = """\
(function () {
  "use strict";
  var APP = window.MUIT_APP;
  if (!APP || !document.body) { return; }
  var BOOT = window.MUIT_BOOTSTRAP || null;
  var screenName = document.body.getAttribute("data-screen");
  var SCREEN = APP.screens[screenName];
  if (!SCREEN) { return; }

  function context() {
    var ua = navigator.userAgent || "";
    var os = /iPad|iPhone|iPod/.test(ua) ? "iOS" : (/Android/.test(ua) ? "Android" : "desktop");
    var w = window.innerWidth, h = window.innerHeight;
    return {
      screen: {
        deviceos: os,
        devicetype: w < 760 ? "phone" : "tablet",
        device: { orientation: w > h ? "horizontal" : "vertical" },
        window: { innerWidth: w, innerHeight: h }
      },
      network: { online: navigator.onLine !== false }
    };
  }

  var CTX = context();
  var model = {};
  var watchers = {};  // path prefix -> [fn]

  function notify(path) {
    Object.keys(watchers).forEach(function (p) {
      if (p === path || p.indexOf(path + ".") === 0 || path.indexOf(p + ".") === 0) {
        watchers[p].forEach(function (fn) { fn(); });
      }
    });
  }

  function watch(path, fn) {
    (watchers[path] = watchers[path] || []).push(fn);
  }

  function truthy(v) {
    if (v === null || v === undefined) { return false; }
    if (Array.isArray(v)) { return true; }
    if (typeof v === "object") { return true; }
    return !!v;
  }

  function text(v) {
    if (v === null || v === undefined) { return ""; }
    if (typeof v === "boolean") { return v ? "true" : "false"; }
    if (Array.isArray(v)) { return v.map(text).join(", "); }
    if (typeof v === "object") {
      var keys = Object.keys(v);
      for (var i = 0; i < keys.length; i++) {
        if (typeof v[keys[i]] === "string") { return v[keys[i]]; }
      }
      return keys.length ? text(v[keys[0]]) : "";
    }
    return String(v);
  }

  function isoDate(y, m, d) {
    var dt = new Date(Date.UTC(y, m - 1, 1));
    dt.setUTCDate(d);
    return dt.toISOString().slice(0, 10);
  }

  function datePart(v, part) {
    var m = /^(\\d{4})-(\\d{2})-(\\d{2})/.exec(String(v));
    if (!m) { return null; }
    return part === 0 ? +m[1] : (part === 1 ? +m[2] : +m[3]);
  }

  function entityDefaults(name) {
    var spec = APP.entities[name];
    var obj = {};
    if (spec) {
      spec.props.forEach(function (p) {
        obj[p.name] = p.default !== undefined && p.default !== null ? p.default
          : (p.tags ? [] : null);
      });
    }
    return obj;
  }

  function firstArray(obj) {
    if (Array.isArray(obj)) { return obj; }
    if (obj && typeof obj === "object") {
      var keys = Object.keys(obj);
      for (var i = 0; i < keys.length; i++) {
        if (Array.isArray(obj[keys[i]])) { return obj[keys[i]]; }
      }
    }
    return [];
  }

  function submit(op, values) {
    if (!BOOT || !BOOT.submit_url) { return null; }
    var req = new XMLHttpRequest();
    req.open("POST", BOOT.submit_url, true);
    req.setRequestHeader("Content-Type", "application/json");
    req.send(JSON.stringify(values));
    document.body.setAttribute("data-submitted", op);
    return null;
  }

  function callOperation(name, args, scope) {
    var op = APP.operations[name];
    if (!op) { return null; }
    if (BOOT && BOOT.op === name) {
      var values = {};
      op.params.forEach(function (p, i) { values[p.name] = args[i]; });
      return submit(name, values);
    }
    if (op.remote) {
      return BOOT && BOOT.data ? firstArray(BOOT.data) : [];
    }
    var inner = Object.create(scope || null);
    op.params.forEach(function (p, i) { inner[p.name] = args[i]; });
    var collected = [];
    try {
      runBlock(op.body, inner, collected);
    } catch (e) {
      if (e && e.__ret !== undefined) {
        return e.__ret;
      }
      return null;
    }
    return collected.length ? collected : null;
  }

  function lookup(path, scope) {
    var parts = path.split(".");
    var root = parts[0];
    var v;
    if (scope && root in scope) { v = scope[root]; }
    else if (root in model) { v = model[root]; }
    else if (root in CTX) { v = CTX[root]; }
    else if (APP.widgets[root]) { v = model; }  // widget members live on the shared model
    else { return undefined; }
    for (var i = 1; i < parts.length && v !== null && v !== undefined; i++) {
      v = v[parts[i]];
    }
    return v;
  }

  function pathOf(e) {
    if (e.k === "name") { return e.v; }
    if (e.k === "member") {
      var base = pathOf(e.obj);
      return base === null ? null : base + "." + e.name;
    }
    return null;
  }

  function ev(e, scope, collected) {
    switch (e.k) {
      case "str": case "int": case "bool": return e.v;
      case "name": {
        var v = lookup(e.v, scope);
        return v === undefined ? null : v;
      }
      case "member": {
        var p = pathOf(e);
        if (p !== null) {
          var got = lookup(p, scope);
          if (got !== undefined) { return got; }
        }
        var obj = ev(e.obj, scope, collected);
        return obj === null || obj === undefined ? null : obj[e.name];
      }
      case "un": {
        var x = ev(e.e, scope, collected);
        return e.op === "!" ? !truthy(x) : -x;
      }
      case "bin": return binop(e, scope, collected);
      case "new": {
        var target = APP.screens[e.screen];
        if (target && e.args.length <= 0) { window.location.href = rel(target.path); }
        else if (target) {
          var arg = ev(e.args[0], scope, collected);
          try { sessionStorage.setItem("muit_arg_" + e.screen, JSON.stringify(arg)); } catch (err) {}
          window.location.href = rel(target.path);
        }
        return null;
      }
      case "call": return call(e, scope, collected);
      case "block": {
        runBlock(e.body, Object.create(scope || null), collected);
        return null;
      }
    }
    return null;
  }

  function rel(bundlePath) {
    // Documents live in screens/, so sibling screens are plain filenames.
    return bundlePath.replace(/^screens\\//, "");
  }

  function binop(e, scope, collected) {
    if (e.op === "&&") { return truthy(ev(e.l, scope, collected)) ? truthy(ev(e.r, scope, collected)) : false; }
    if (e.op === "||") { return truthy(ev(e.l, scope, collected)) ? true : truthy(ev(e.r, scope, collected)); }
    var l = ev(e.l, scope, collected);
    var r = ev(e.r, scope, collected);
    switch (e.op) {
      case "==": return l === r;
      case "!=": return l !== r;
      case "<": return l < r;
      case ">": return l > r;
      case "<=": return l <= r;
      case ">=": return l >= r;
      case "in":
        if (Array.isArray(r)) { return r.indexOf(l) >= 0; }
        if (typeof r === "string") { return typeof l === "string" && r.indexOf(l) >= 0; }
        return false;
      case "+":
        if (typeof l === "string" || typeof r === "string") { return text(l) + text(r); }
        return l + r;
      case "-": return l - r;
      case "*": return l * r;
      case "%": return r === 0 ? null : l % r;
    }
    return null;
  }

  function call(e, scope, collected) {
    var fn = e.fn;
    var args = e.args.map(function (a) { return ev(a, scope, collected); });
    if (fn.k === "name") {
      switch (fn.v) {
        case "exist": return args[0] !== null && args[0] !== undefined;
        case "add": if (collected) { collected.push(args[0]); } return null;
        case "select": return args[0] === undefined ? null : args[0];
        case "navigate": return null;
        case "httpRequest": return BOOT && BOOT.data ? firstArray(BOOT.data) : [];
      }
      if (APP.operations[fn.v]) { return callOperation(fn.v, args, scope); }
    }
    if (fn.k === "member") {
      var base = pathOf(fn.obj);
      if (base === "history") { window.history.back(); return null; }
      if (base === "DateTime" && fn.name === "create") { return isoDate(args[0], args[1], args[2]); }
      if (fn.name === "getYear" || fn.name === "getMonth" || fn.name === "getDate") {
        var recv = ev(fn.obj, scope, collected);
        return datePart(recv, fn.name === "getYear" ? 0 : (fn.name === "getMonth" ? 1 : 2));
      }
      if (fn.name.indexOf("from") === 0 && APP.entities[fn.obj.v]) {
        if (BOOT && BOOT.data && typeof BOOT.data === "object" && !Array.isArray(BOOT.data)) {
          var seeded = entityDefaults(fn.obj.v);
          Object.keys(BOOT.data).forEach(function (k) {
            if (k in seeded) { seeded[k] = BOOT.data[k]; }
          });
          return seeded;
        }
        return entityDefaults(fn.obj.v);
      }
      if (APP.operations[fn.name]) { return callOperation(fn.name, args, scope); }
    }
    return null;
  }

  function runBlock(stmts, scope, collected) {
    for (var i = 0; i < stmts.length; i++) {
      runStmt(stmts[i], scope, collected);
    }
  }

  function runStmt(s, scope, collected) {
    switch (s.k) {
      case "var":
        scope[s.name] = s.init ? ev(s.init, scope, collected) : null;
        break;
      case "assign": {
        var value = ev(s.value, scope, collected);
        var path = pathOf(s.target);
        if (path === null) { break; }
        var parts = path.split(".");
        if (parts.length === 1) {
          if (scope && parts[0] in scope) { scope[parts[0]] = value; }
          else { model[parts[0]] = value; notify(parts[0]); }
        } else {
          var obj = lookup(parts.slice(0, -1).join("."), scope);
          if (obj) { obj[parts[parts.length - 1]] = value; notify(path); }
        }
        break;
      }
      case "expr": ev(s.e, scope, collected); break;
      case "if": {
        for (var b = 0; b < s.branches.length; b++) {
          if (truthy(ev(s.branches[b].cond, scope, collected))) {
            runBlock(s.branches[b].body, scope, collected);
            return;
          }
        }
        if (s["else"]) { runBlock(s["else"], scope, collected); }
        break;
      }
      case "foreach": {
        var items = ev(s.iter, scope, collected);
        if (!Array.isArray(items)) { items = items === null || items === undefined ? [] : [items]; }
        for (var j = 0; j < items.length; j++) {
          var inner = Object.create(scope || null);
          inner[s["var"]] = items[j];
          runBlock(s.body, inner, collected);
        }
        break;
      }
      case "return": {
        var err = new Error("return");
        err.__ret = s.e ? ev(s.e, scope, collected) : null;
        throw err;
      }
    }
  }

  function renderDyn(root, scope) {
    var nodes = root.querySelectorAll("[data-expr]");
    for (var i = 0; i < nodes.length; i++) {
      (function (node) {
        var eid = node.getAttribute("data-expr");
        var descriptor = SCREEN.exprs[eid];
        if (!descriptor) { return; }
        node.textContent = text(ev(descriptor, scope, null));
      })(nodes[i]);
    }
  }

  function applyRules() {
    CTX = context();
    SCREEN.rules.forEach(function (rule) {
      var winner = null;
      for (var i = 0; i < rule.clauses.length; i++) {
        var clause = rule.clauses[i];
        if (clause.cond === null || truthy(ev(clause.cond, null, null))) {
          winner = clause.branch;
          break;
        }
      }
      if (winner === null) { winner = rule["else"]; }
      rule.clauses.forEach(function (clause) {
        var el = document.getElementById(clause.branch);
        if (el) { el.hidden = clause.branch !== winner; }
      });
      if (rule["else"]) {
        var el = document.getElementById(rule["else"]);
        if (el) { el.hidden = rule["else"] !== winner; }
      }
    });
  }

  function wireBinding(binding, element, scope) {
    if (binding.model) {
      element.addEventListener(binding.event, function () {
        var raw = element.type === "checkbox" ? element.checked :
          (element.type === "number" ? +element.value : element.value);
        var parts = binding.model.split(".");
        if (parts.length === 1) { model[parts[0]] = raw; notify(parts[0]); }
        else {
          var obj = lookup(parts.slice(0, -1).join("."), scope);
          if (obj) { obj[parts[parts.length - 1]] = raw; notify(binding.model); }
        }
      });
      var sync = function () {
        var v = lookup(binding.model, scope);
        if (v === undefined || v === null) { return; }
        if (element.type === "checkbox") { element.checked = !!v; }
        else { element.value = v; }
      };
      watch(binding.model, sync);
      sync();
      return;
    }
    if (binding.event) {
      element.addEventListener(binding.event, function (evt) {
        evt.preventDefault();
        runBlock(binding.action, Object.create(scope || null), []);
        renderDyn(document, scope);
      });
    }
    binding.watch.forEach(function (path) {
      watch(path, function () { renderDyn(element.parentNode || element, scope); });
    });
  }

  function hydrateForeach() {
    Object.keys(SCREEN.foreach).forEach(function (fid) {
      var spec = SCREEN.foreach[fid];
      var container = document.getElementById(fid);
      if (!container) { return; }
      var template = container.querySelector("template");
      var iterDescriptor = SCREEN.exprs[spec.iter];
      var items = iterDescriptor ? ev(iterDescriptor, null, []) : [];
      if (!Array.isArray(items)) { items = items ? [items] : []; }
      items.forEach(function (item, index) {
        var clone = template.content.cloneNode(true);
        var scope = {};
        scope[spec["var"]] = item;
        var all = clone.querySelectorAll("[id]");
        for (var i = 0; i < all.length; i++) {
          all[i].setAttribute("data-row", String(index));
          all[i].id = all[i].id + ":" + index;
        }
        var nodes = clone.querySelectorAll("[data-expr]");
        for (var j = 0; j < nodes.length; j++) {
          var descriptor = SCREEN.exprs[nodes[j].getAttribute("data-expr")];
          if (descriptor) { nodes[j].textContent = text(ev(descriptor, scope, null)); }
        }
        SCREEN.bindings.forEach(function (binding) {
          var match = clone.querySelector("#" + CSS.escape(binding.element + ":" + index));
          if (match) { wireBinding(binding, match, scope); }
        });
        container.appendChild(clone);
      });
    });
  }

  function wireWidgets() {
    var fields = document.querySelectorAll("[data-widget-field]");
    for (var i = 0; i < fields.length; i++) {
      (function (field) {
        var spec = APP.widgets[field.getAttribute("data-widget-field")];
        if (!spec) { return; }
        field.addEventListener("change", function () {
          var scope = { option: { value: field.type === "number" ? +field.value : field.value } };
          runBlock(spec.behavior, scope, []);
          renderDyn(document, null);
        });
      })(fields[i]);
    }
  }

  function wireTouches() {
    var root = document.querySelector("[data-touch]");
    if (!root) { return; }
    var names = root.getAttribute("data-touch").split(" ");
    var startX = 0, startY = 0;
    root.addEventListener("touchstart", function (evt) {
      startX = evt.touches[0].clientX;
      startY = evt.touches[0].clientY;
    });
    root.addEventListener("touchend", function (evt) {
      var dx = evt.changedTouches[0].clientX - startX;
      var dy = evt.changedTouches[0].clientY - startY;
      if (Math.abs(dx) >= 60 && Math.abs(dy) / Math.abs(dx) < 0.577) {
        names.forEach(function (name) {
          var touch = APP.touches[name];
          if (touch && touch.kind === "swipe") { runBlock(touch.action, {}, []); }
        });
      }
    });
  }

  function boot() {
    // Platform stylesheet variant.
    var links = document.querySelectorAll("link[data-platform]");
    for (var i = 0; i < links.length; i++) {
      links[i].media = links[i].getAttribute("data-platform") === CTX.screen.deviceos ? "all" : "not all";
    }
    // Module variables, then engine bootstrap, then screen parameters.
    Object.keys(APP.vars).forEach(function (name) {
      model[name] = APP.vars[name] ? ev(APP.vars[name], null, null) : null;
    });
    if (SCREEN.params.length > 0) {
      var p0 = SCREEN.params[0].name;
      try {
        var saved = sessionStorage.getItem("muit_arg_" + screenName);
        if (saved) { model[p0] = JSON.parse(saved); }
      } catch (err) {}
      if (model[p0] === undefined && BOOT && BOOT.data) { model[p0] = BOOT.data; }
    }
    runBlock(SCREEN.setup, model, []);
    SCREEN.bindings.forEach(function (binding) {
      var element = document.getElementById(binding.element);
      if (element) { wireBinding(binding, element, null); }
    });
    hydrateForeach();
    wireWidgets();
    wireTouches();
    applyRules();
    renderDyn(document, null);
    window.addEventListener("resize", applyRules);
    window.addEventListener("online", applyRules);
    window.addEventListener("offline", applyRules);
  }

  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", boot);
  } else {
    boot();
  }
})();
"""
