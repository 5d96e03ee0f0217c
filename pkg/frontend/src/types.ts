// Wire shapes shared with the engine service and the compiled bundle.

// ---- expression / statement descriptors (bundle payload) ----

export type Expr =
  | { k: 'str'; v: string }
  | { k: 'int'; v: number }
  | { k: 'bool'; v: boolean }
  | { k: 'name'; v: string }
  | { k: 'member'; obj: Expr; name: string }
  | { k: 'call'; fn: Expr; args: Expr[] }
  | { k: 'un'; op: string; e: Expr }
  | { k: 'bin'; op: string; l: Expr; r: Expr }
  | { k: 'new'; screen: string; args: Expr[] }
  | { k: 'block'; body: Stmt[] };

export type Stmt =
  | { k: 'var'; name: string; init: Expr | null }
  | { k: 'assign'; target: Expr; value: Expr }
  | { k: 'expr'; e: Expr }
  | { k: 'if'; branches: { cond: Expr; body: Stmt[] }[]; else: Stmt[] | null }
  | { k: 'foreach'; var: string; iter: Expr; body: Stmt[] }
  | { k: 'return'; e: Expr | null };

// ---- bundle manifest ----

export interface ScreenParam {
  name: string;
  type: string;
}

export interface ManifestScreen {
  cached: boolean;
  name: string;
  params: ScreenParam[];
  path: string;
}

export interface Manifest {
  app: string;
  assets: Record<string, string>; // path -> "sha256:<hex>"
  cache_assets: string[];
  deep_link_template: string;
  entry: string;
  manifest_version: number;
  navigation: { edges: { from: string; kind: string; to: string; via: string }[]; nodes: string[] };
  screens: ManifestScreen[];
  service_url: string;
  stack: { pop: string; push: string };
}

// ---- app payload embedded in app.js (window.MUIT_APP) ----

export interface PropSpec {
  default: string | number | boolean | null;
  name: string;
  tags: string[] | null;
  type: string;
}

export interface OpSpec {
  async: boolean;
  body: Stmt[];
  params: ScreenParam[];
  remote: boolean;
}

export interface Binding {
  action: Stmt[];
  element: string;
  event: string | null;
  model?: string;
  targets: string[];
  watch: string[];
}

export interface RuleClause {
  branch: string;
  cond: Expr | null;
  trigger: string;
}

export interface RuleSpec {
  clauses: RuleClause[];
  else: string | null;
  id: string;
}

export interface ScreenSpec {
  bindings: Binding[];
  cached: boolean;
  exprs: Record<string, Expr>;
  foreach: Record<string, { iter: string; var: string }>;
  params: ScreenParam[];
  path: string;
  rules: RuleSpec[];
  setup: Stmt[];
  touches: string[];
  widgets: string[];
}

export interface AppPayload {
  app: string;
  deep_link_template: string;
  entities: Record<string, { props: PropSpec[] }>;
  entry: string;
  navigation: Manifest['navigation'];
  operations: Record<string, OpSpec>;
  screens: Record<string, ScreenSpec>;
  service_url: string;
  touches: Record<string, { kind: string; action: Stmt[] }>;
  vars: Record<string, Expr | null>;
  widgets: Record<string, { kind: string; behavior: Stmt[] }>;
}

// ---- engine-injected task bootstrap (window.MUIT_BOOTSTRAP) ----

export interface Bootstrap {
  instance: string;
  op: string | null;
  state: string;
  data: Record<string, unknown>;
  submit_url: string;
  service: string;
}

// ---- /sync wire ----

export interface SyncItem {
  instance_id: string;
  seq: number;
  data: Record<string, unknown>;
  submitted_at?: string;
}

export interface SyncAck {
  instance_id: string;
  seq: number;
  status: string; // Completed | AlreadyCompleted | AlreadyApplied | Rejected | NotFound
  detail?: string;
}

export interface SyncResponse {
  device_id: string;
  acks: SyncAck[];
}

// ---- inbox ----

export interface InboxTask {
  instance_id: string;
  op: string;
  data: Record<string, unknown>;
  pending?: boolean; // result captured offline, not yet acknowledged
  error?: string; // sync rejection detail, kept visible
}
