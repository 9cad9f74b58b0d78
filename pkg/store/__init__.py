"""
Policy store: file-backed data policies and app registrations
"""
from .models import AppRegistration, PolicyRecord, Provenance
from .store import PolicyStore, StoreValidationError, get_store, init_store

__all__ = [
    "AppRegistration",
    "PolicyRecord",
    "PolicyStore",
    "Provenance",
    "StoreValidationError",
    "get_store",
    "init_store",
]
