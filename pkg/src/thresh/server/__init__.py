from .app import create_app, fetch_text, serve
from .completion import completion_code, missing_instances, verify_completion_code
from .config import ServerConfig, load_config
from .store import FileStore, MemoryStore, SessionNotFound, SessionStore, current_documents

__all__ = [
    "create_app",
    "fetch_text",
    "serve",
    "completion_code",
    "missing_instances",
    "verify_completion_code",
    "ServerConfig",
    "load_config",
    "FileStore",
    "MemoryStore",
    "SessionNotFound",
    "SessionStore",
    "current_documents",
]
