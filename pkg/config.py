"""
Configuration for the DToU engine
Settings are read from the environment (and a .env file) once per process
"""
import logging
import os
from pathlib import Path
from typing import Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_VOCAB = "https://w3id.org/dtou/vocab#"


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Invalid integer for {name}: {raw!r}, using {default}")
        return default


class Settings(BaseModel):
    """Runtime settings shared by the service, the CLI and the benchmark"""
    store_dir: Path = Field(default=Path("./dtou-store"), description="Directory holding policy records")
    listen: str = Field(default="127.0.0.1:8000", description="host:port the service binds to")
    strict: bool = Field(default=False, description="Deny usage of inputs without a stored data policy")
    registration_ttl: int = Field(default=86400, ge=1, description="App registration lifetime in seconds")
    max_document_size: int = Field(default=1048576, ge=1, description="Largest accepted Turtle body in bytes")
    rdfs_closure: bool = Field(default=False, description="Use rdfs:subClassOf closure in tag matching")
    vocab: str = Field(default=DEFAULT_VOCAB, description="IRI behind the empty prefix")
    log_level: str = Field(default="INFO")

    def listen_address(self) -> Tuple[str, int]:
        """Split `listen` into host and port"""
        host, _, port = self.listen.rpartition(":")
        if not host:
            return self.listen, 8000
        return host, int(port)


def load_settings(**overrides: Optional[object]) -> Settings:
    """
    Build settings from DTOU_* environment variables

    Args:
        **overrides: Explicit values (e.g. from CLI flags); None values are ignored

    Returns:
        Settings instance
    """
    values = {
        "store_dir": Path(os.getenv("DTOU_STORE", "./dtou-store")),
        "listen": os.getenv("DTOU_LISTEN", "127.0.0.1:8000"),
        "strict": _env_bool("DTOU_STRICT", False),
        "registration_ttl": _env_int("DTOU_REGISTRATION_TTL", 86400),
        "max_document_size": _env_int("DTOU_MAX_DOCUMENT_SIZE", 1048576),
        "rdfs_closure": _env_bool("DTOU_RDFS_CLOSURE", False),
        "vocab": os.getenv("DTOU_VOCAB", DEFAULT_VOCAB),
        "log_level": os.getenv("DTOU_LOG_LEVEL", "INFO"),
    }
    values.update({key: value for key, value in overrides.items() if value is not None})
    return Settings(**values)
