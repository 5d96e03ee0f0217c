from .app import Parking, ServiceState, create_app, perform_delivery
from .config import ConfigError, DeploymentSpec, ServiceConfig, load_config, parse_config
from .deploy import (
    APPROVAL_HANDLERS,
    APPROVAL_RESULT_FIELDS,
    Deployment,
    DeploymentError,
    approve_result,
    build_deployment,
    delay_result,
    find_due_date,
)
from .notify import (
    LogNotifier,
    Notification,
    NotificationRouter,
    WebhookNotifier,
    task_title,
)

__all__ = [
    "APPROVAL_HANDLERS",
    "APPROVAL_RESULT_FIELDS",
    "ConfigError",
    "Deployment",
    "DeploymentError",
    "DeploymentSpec",
    "LogNotifier",
    "Notification",
    "NotificationRouter",
    "Parking",
    "ServiceConfig",
    "ServiceState",
    "WebhookNotifier",
    "approve_result",
    "build_deployment",
    "create_app",
    "delay_result",
    "find_due_date",
    "load_config",
    "parse_config",
    "task_title",
]
