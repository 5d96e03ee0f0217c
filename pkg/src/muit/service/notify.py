"""Stakeholder notification: task name plus a deep link to the UI."""

from __future__ import annotations

import logging
from dataclasses import dataclass

logger = logging.getLogger("muit.notify")


@dataclass
class Notification:
    instance_id: str
    recipient: str
    title: str
    deep_link: str


class LogNotifier:
    """Records deliveries and writes one log line each."""

    channel = "log"

    def __init__(self):
        self.deliveries: list[dict] = []

    def deliver(self, notification: Notification, at: float) -> None:
        self.deliveries.append(
            {
                "instance_id": notification.instance_id,
                "recipient": notification.recipient,
                "title": notification.title,
                "deep_link": notification.deep_link,
                "at": at,
            }
        )
        logger.info(
            "notify recipient=%s title=%r link=%s",
            notification.recipient,
            notification.title,
            notification.deep_link,
        )


class WebhookNotifier:
    """POSTs each notification as JSON to a configured URL.

    `post` is injectable; the default does a short blocking POST and
    swallows transport errors (notification is best-effort).
    """

    channel = "webhook"

    def __init__(self, url: str, post=None):
        self.url = url
        self.deliveries: list[dict] = []
        self._post = post if post is not None else _default_post

    def deliver(self, notification: Notification, at: float) -> None:
        payload = {
            "instance_id": notification.instance_id,
            "recipient": notification.recipient,
            "title": notification.title,
            "deep_link": notification.deep_link,
        }
        self.deliveries.append(dict(payload, at=at))
        self._post(self.url, payload)


def _default_post(url: str, payload: dict) -> None:
    import httpx

    try:
        httpx.post(url, json=payload, timeout=2.0)
    except httpx.HTTPError:
        logger.warning("webhook delivery to %s failed", url)


class NotificationRouter:
    """recipient -> notifier, with an optional catch-all default."""

    def __init__(self, routes: dict | None = None, default=None):
        self.routes = dict(routes or {})
        self.default = default
        self.undeliverable: list[dict] = []

    def dispatch(self, notification: Notification, at: float) -> bool:
        notifier = self.routes.get(notification.recipient, self.default)
        if notifier is None:
            self.undeliverable.append(
                {
                    "instance_id": notification.instance_id,
                    "recipient": notification.recipient,
                    "title": notification.title,
                    "at": at,
                }
            )
            logger.info("notify undeliverable recipient=%s", notification.recipient)
            return False
        notifier.deliver(notification, at)
        return True


def task_title(payload: dict, fallback: str) -> str:
    """Best task name for a notification line, from the request data."""
    for key in ("task_name", "taskname", "title"):
        value = payload.get(key)
        if isinstance(value, str) and value:
            return value
    for value in payload.values():
        if isinstance(value, dict):
            found = task_title(value, "")
            if found:
                return found
    return fallback
