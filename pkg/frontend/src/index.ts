export { App, boot, extractPayload, localOutcome, Model, ModelScope, CASCADE_MIN_WIDTH } from './app';
export type { AppWindow, BootOptions, DeepLinkResult } from './app';
export { ContextTracker, snapshotOf, REFRESH_EVENTS } from './context';
export type { ContextSnapshot, WindowLike } from './context';
export { EventBus } from './event-bus';
export { attachSwipe, classifySwipe } from './gestures';
export type { SwipeDirection } from './gestures';
export { TaskInbox } from './inbox';
export { Interp, Scope, text, truthy, evaluateRule } from './interp';
export type { Hooks, Value } from './interp';
export { Frame } from './render';
export type { RenderHost } from './render';
export { ScreenStack } from './screen-stack';
export { OfflineStore, sha256Hex, SCHEMA } from './store';
export type { StorageLike } from './store';
export { SyncEngine, ACK_DONE } from './sync-engine';
export type { FetchLike, SubmitOutcome, SyncState } from './sync-engine';
export type {
  AppPayload,
  Binding,
  Bootstrap,
  Expr,
  InboxTask,
  Manifest,
  ManifestScreen,
  OpSpec,
  RuleSpec,
  ScreenSpec,
  Stmt,
  SyncAck,
  SyncItem,
  SyncResponse,
} from './types';
