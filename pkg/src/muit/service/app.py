"""HTTP surface: SOAP in, task UIs and results out, offline sync.

Paths: POST /svc/{name}, GET /task/{id}/ui, POST /task/{id}/result,
POST /sync, GET /metrics, GET /bundle/{name}/{asset}. SOAP travels
as text/xml, everything device-facing as application/json.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import logging
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.responses import HTMLResponse, JSONResponse
from pydantic import BaseModel, Field

from muit.bridge import (
    BRIDGE_NS,
    SOAP_NS,
    BridgeError,
    SoapFormatError,
    TaskEnvelope,
    WireFormatError,
    canonical_to_soap,
    make_fault,
    soap_to_canonical,
)
from muit.codegen import DEEP_LINK_TEMPLATE
from muit.engine import (
    ASYNC,
    SYNC,
    TERMINAL_STATES,
    AlreadyCompleted,
    AppendLogStore,
    BackpressureError,
    DeliveryAction,
    InstanceManager,
    MemoryStore,
    OperationMismatchError,
    SystemClock,
    UnknownInstanceError,
)

from .config import ServiceConfig
from .deploy import Deployment
from .notify import LogNotifier, Notification, NotificationRouter, WebhookNotifier, task_title

logger = logging.getLogger("muit.service")

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".js": "application/javascript; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
}


class Parking:
    """Parked sync connections, keyed by resumption token.

    Answers arriving while nobody waits are buffered so a caller that
    dropped the connection can pick them up with the token. Runs
    entirely on the event loop; no worker thread is held per parked
    request.
    """

    def __init__(self):
        self._waiters: dict[str, asyncio.Future] = {}
        self._answers: dict[str, tuple[bytes, int]] = {}

    async def wait(self, token: str, timeout_s: float) -> tuple[bytes, int] | None:
        if token in self._answers:
            return self._answers.pop(token)
        future = asyncio.get_running_loop().create_future()
        self._waiters[token] = future
        try:
            return await asyncio.wait_for(future, timeout_s)
        except asyncio.TimeoutError:
            return None
        finally:
            self._waiters.pop(token, None)

    def answer(self, token: str, body: bytes, status: int) -> None:
        future = self._waiters.pop(token, None)
        if future is not None and not future.done():
            future.set_result((body, status))
        else:
            self._answers[token] = (body, status)

    def parked_count(self) -> int:
        return len(self._waiters) + len(self._answers)


class SyncItem(BaseModel):
    instance_id: str
    seq: int = Field(ge=0)
    data: dict
    submitted_at: str | None = None


class SyncBatch(BaseModel):
    device_id: str = Field(min_length=1)
    items: list[SyncItem]


@dataclass
class ServiceState:
    deployments: dict[str, Deployment]
    manager: InstanceManager
    parking: Parking
    notifier: NotificationRouter
    config: ServiceConfig
    send_callback: object = None
    counters: dict = field(default_factory=lambda: {
        "soap_requests": 0,
        "soap_faults": 0,
        "results_accepted": 0,
        "results_replayed": 0,
        "sync_batches": 0,
        "sync_items": 0,
        "notifications_sent": 0,
        "notifications_undeliverable": 0,
        "callbacks_posted": 0,
        "callback_failures": 0,
    })
    device_seq: dict = field(default_factory=dict)

    def deployment_of(self, view: dict) -> Deployment | None:
        name = view.get("meta", {}).get("deployment", "")
        return self.deployments.get(name)


def _xml(body: bytes, status: int = 200, headers: dict | None = None) -> Response:
    return Response(content=body, status_code=status,
                    media_type="text/xml", headers=headers)


def _accept_envelope(instance_id: str, cid: str) -> bytes:
    return (
        '<?xml version="1.0" encoding="utf-8"?>'
        f'<soap:Envelope xmlns:soap="{SOAP_NS}"><soap:Body>'
        f'<m:accepted xmlns:m="{BRIDGE_NS}">'
        f"<instance>{instance_id}</instance><cid>{cid}</cid>"
        "</m:accepted></soap:Body></soap:Envelope>"
    ).encode("utf-8")


def _pending_envelope(instance_id: str, token: str) -> bytes:
    return (
        '<?xml version="1.0" encoding="utf-8"?>'
        f'<soap:Envelope xmlns:soap="{SOAP_NS}"><soap:Body>'
        f'<m:pending xmlns:m="{BRIDGE_NS}">'
        f"<instance>{instance_id}</instance><token>{token}</token>"
        "</m:pending></soap:Body></soap:Envelope>"
    ).encode("utf-8")


def _bootstrap_script(instance_id: str, view: dict,
                      deployment: Deployment) -> str:
    boot = {
        "instance": instance_id,
        "op": view.get("operation"),
        "state": view.get("state"),
        "data": view.get("data", {}),
        "submit_url": f"/task/{instance_id}/result",
        "service": deployment.name,
    }
    blob = json.dumps(boot, sort_keys=True, ensure_ascii=False).replace("</", "<\\/")
    return (
        f'<base href="/bundle/{deployment.name}/screens/">'
        f"<script>window.MUIT_BOOTSTRAP = {blob};</script>"
    )


_GONE_PAGE = """<!DOCTYPE html>
<html lang="en"><head><meta charset="utf-8"><title>Task complete</title></head>
<body><main><h1>This task is already finished</h1>
<p>The task reached state {state}; its user interface is no longer available.</p>
</main></body></html>"""


def _default_sender(state: ServiceState):
    async def send(url: str, body: bytes) -> None:
        import httpx

        try:
            async with httpx.AsyncClient(timeout=5.0) as client:
                await client.post(url, content=body,
                                  headers={"content-type": "text/xml; charset=utf-8"})
            state.counters["callbacks_posted"] += 1
        except httpx.HTTPError:
            state.counters["callback_failures"] += 1
            logger.warning("callback delivery to %s failed", url)

    return send


async def perform_delivery(state: ServiceState, action: DeliveryAction) -> None:
    if action.kind == "callback":
        await state.send_callback(action.target, canonical_to_soap(action.envelope))
    elif action.kind == "fault_callback":
        await state.send_callback(action.target, make_fault(*action.fault))
    elif action.kind == "answer":
        state.parking.answer(action.target, canonical_to_soap(action.envelope), 200)
    elif action.kind == "fault_answer":
        state.parking.answer(action.target, make_fault(*action.fault), 500)


def create_app(
    deployments: list[Deployment] | None = None,
    config: ServiceConfig | None = None,
    store=None,
    clock=None,
    notifier: NotificationRouter | None = None,
    send_callback=None,
    manager: InstanceManager | None = None,
) -> FastAPI:
    config = config or ServiceConfig()
    clock = clock or SystemClock()
    if notifier is None:
        default = LogNotifier() if config.default_channel == "log" else None
        routes = {
            recipient: WebhookNotifier(url)
            for recipient, url in config.webhooks.items()
        }
        notifier = NotificationRouter(routes=routes, default=default)
    if manager is None:
        if store is None:
            store = (
                AppendLogStore(config.engine.store_path)
                if config.engine.store_path
                else MemoryStore()
            )
        manager = InstanceManager(
            store=store,
            clock=clock,
            config=config.engine,
            on_transition=lambda iid, src, dst, at: logger.info(
                "transition instance=%s from=%s to=%s t=%.3f", iid, src, dst, at
            ),
        )

    state = ServiceState(
        deployments={d.name: d for d in (deployments or [])},
        manager=manager,
        parking=Parking(),
        notifier=notifier,
        config=config,
    )
    state.send_callback = send_callback or _default_sender(state)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = None
        if config.sweep_interval_s > 0:
            task = asyncio.create_task(_sweep_loop(state, config.sweep_interval_s))
        yield
        if task is not None:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(title="muit-engine", lifespan=lifespan)
    app.state.service = state

    async def sweep_once() -> dict:
        # Deadlines win over passivation: an instance past its deadline
        # faults now instead of going to sleep.
        expired = state.manager.expire()
        for action in expired:
            await perform_delivery(state, action)
        passivated = state.manager.passivate_idle()
        return {"passivated": passivated, "expired": [a.instance_id for a in expired]}

    app.state.sweep_once = sweep_once

    async def _sweep_loop(state: ServiceState, interval: float):
        while True:
            await asyncio.sleep(interval)
            try:
                await sweep_once()
            except Exception:
                logger.exception("background sweep failed")

    # -- process side ------------------------------------------------

    @app.post("/svc/{name}")
    async def handle_soap(name: str, request: Request):
        state.counters["soap_requests"] += 1
        resume = request.headers.get("x-resumption-token")
        if resume:
            answer = await state.parking.wait(resume, config.long_poll_s)
            if answer is None:
                return _xml(_pending_envelope("", resume), 202,
                            {"x-resumption-token": resume})
            return _xml(answer[0], answer[1])

        deployment = state.deployments.get(name)
        if deployment is None:
            state.counters["soap_faults"] += 1
            return _xml(make_fault("Client", f"no service deployed at /svc/{name}"), 404)
        body = await request.body()
        try:
            envelope = soap_to_canonical(body).validated()
        except (SoapFormatError, WireFormatError) as exc:
            state.counters["soap_faults"] += 1
            return _xml(make_fault("Client", str(exc)), 400)

        mode = ASYNC if envelope.callback_address else SYNC
        try:
            instance = state.manager.create(
                envelope,
                mode,
                callback_address=envelope.callback_address,
                assigned_user=deployment.assignee,
                meta={"deployment": deployment.name},
            )
        except BackpressureError as exc:
            state.counters["soap_faults"] += 1
            return _xml(make_fault("Server", str(exc)), 503)

        notification = Notification(
            instance_id=instance.instance_id,
            recipient=deployment.assignee,
            title=task_title(envelope.payload, envelope.operation),
            deep_link=DEEP_LINK_TEMPLATE.format(
                instance=instance.instance_id, screen=deployment.entry_screen
            ),
        )
        if state.notifier.dispatch(notification, clock.now()):
            state.counters["notifications_sent"] += 1
        else:
            state.counters["notifications_undeliverable"] += 1

        if mode == ASYNC:
            return _xml(
                _accept_envelope(instance.instance_id, envelope.correlation_id), 202
            )
        answer = await state.parking.wait(instance.resumption_token, config.long_poll_s)
        if answer is None:
            return _xml(
                _pending_envelope(instance.instance_id, instance.resumption_token),
                202,
                {"x-resumption-token": instance.resumption_token},
            )
        return _xml(answer[0], answer[1])

    # -- device side -------------------------------------------------

    @app.get("/task/{instance_id}/ui")
    async def serve_task_ui(instance_id: str):
        try:
            view = state.manager.peek(instance_id)
        except UnknownInstanceError:
            return JSONResponse({"detail": "unknown instance"}, status_code=404)
        if view["state"] in TERMINAL_STATES:
            return HTMLResponse(_GONE_PAGE.format(state=view["state"]), status_code=410)
        deployment = state.deployment_of(view)
        if deployment is None:
            return JSONResponse({"detail": "instance has no deployment"}, status_code=404)
        state.manager.touch(instance_id)
        manifest = deployment.bundle.manifest
        entry_path = next(
            s["path"] for s in manifest["screens"] if s["name"] == manifest["entry"]
        )
        document = deployment.bundle.files[entry_path].decode("utf-8")
        injected = document.replace(
            "<head>", "<head>" + _bootstrap_script(instance_id, view, deployment), 1
        )
        return HTMLResponse(injected)

    @app.post("/task/{instance_id}/result")
    async def submit_result(instance_id: str, request: Request):
        try:
            data = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return JSONResponse(
                {"detail": f"unparseable JSON: {exc}", "path": "$"}, status_code=422
            )
        outcome, status = await _apply_result(state, instance_id, data)
        return JSONResponse(outcome, status_code=status)

    @app.post("/sync")
    async def sync(batch: SyncBatch):
        state.counters["sync_batches"] += 1
        seqs = [item.seq for item in batch.items]
        if any(b <= a for a, b in zip(seqs, seqs[1:])):
            return JSONResponse(
                {"detail": "sequence numbers must be strictly increasing"},
                status_code=400,
            )
        last_applied = state.device_seq.get(batch.device_id, -1)
        acks = []
        for item in batch.items:
            state.counters["sync_items"] += 1
            if item.seq <= last_applied:
                acks.append(
                    {"instance_id": item.instance_id, "seq": item.seq,
                     "status": "AlreadyApplied"}
                )
                continue
            outcome, status = await _apply_result(state, item.instance_id, item.data)
            if status == 404:
                ack_status = "NotFound"
            elif status == 422:
                ack_status = "Rejected"
            else:
                ack_status = outcome["status"]
            ack = {"instance_id": item.instance_id, "seq": item.seq,
                   "status": ack_status}
            if "detail" in outcome:
                ack["detail"] = outcome["detail"]
            acks.append(ack)
            last_applied = item.seq
        state.device_seq[batch.device_id] = last_applied
        return {"device_id": batch.device_id, "acks": acks}

    # -- shared ------------------------------------------------------

    @app.get("/metrics")
    async def metrics():
        return {
            "engine": state.manager.metrics(),
            "service": dict(state.counters,
                            parked_connections=state.parking.parked_count()),
            "notifications": {
                "undeliverable": len(state.notifier.undeliverable),
            },
        }

    @app.get("/bundle/{name}/{asset:path}")
    async def bundle_asset(name: str, asset: str):
        deployment = state.deployments.get(name)
        if deployment is None or asset not in deployment.bundle.files:
            return JSONResponse({"detail": "no such asset"}, status_code=404)
        suffix = "." + asset.rsplit(".", 1)[-1] if "." in asset else ""
        return Response(
            content=deployment.bundle.files[asset],
            media_type=_CONTENT_TYPES.get(suffix, "application/octet-stream"),
            headers={"cache-control": "public, max-age=3600"},
        )

    return app


async def _apply_result(state: ServiceState, instance_id: str, data) -> tuple[dict, int]:
    try:
        view = state.manager.peek(instance_id)
    except UnknownInstanceError:
        return {"detail": "unknown instance", "status": "NotFound"}, 404
    if view["state"] in TERMINAL_STATES:
        state.counters["results_replayed"] += 1
        return {"instance_id": instance_id, "status": "AlreadyCompleted"}, 200

    deployment = state.deployment_of(view)
    if deployment is None:
        return {"detail": "instance has no deployment", "status": "NotFound"}, 404
    operation = view["operation"]
    try:
        cleaned = deployment.validate_submission(operation, data)
    except WireFormatError as exc:
        return {"detail": str(exc), "path": exc.path, "status": "Rejected"}, 422

    payload = deployment.handle_result(operation, view.get("data", {}), cleaned)
    try:
        result = TaskEnvelope(operation, "sync-result", payload)
        outcome = state.manager.complete(instance_id, result)
    except OperationMismatchError as exc:
        return {"detail": str(exc), "status": "Rejected"}, 422
    except (BridgeError, UnknownInstanceError) as exc:
        return {"detail": str(exc), "status": "Rejected"}, 422

    if isinstance(outcome, AlreadyCompleted):
        state.counters["results_replayed"] += 1
        return {"instance_id": instance_id, "status": "AlreadyCompleted"}, 200
    await perform_delivery(state, outcome)
    state.counters["results_accepted"] += 1
    return {"instance_id": instance_id, "status": "Completed"}, 200
