from .app import create_app
from .config import ServiceConfig, load_service_config
from .store import SessionStore

__all__ = ["create_app", "ServiceConfig", "load_service_config", "SessionStore"]
