"""
Policy store
File-backed storage of data policies and app registrations: one Turtle file
per record plus a JSON manifest, every write a temp file and an atomic rename
"""
import hashlib
import json
import logging
import os
import secrets
import tempfile
import threading
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dateutil import parser as date_parser
from rdflib import URIRef

from policy.errors import DToUError, PolicyError
from policy.extract import extract_app_policy, extract_data_policies
from rdf.turtle import parse_turtle
from store.models import AppRegistration, Manifest, ManifestEntry, PolicyRecord, Provenance

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
DEFAULT_TTL = 86400


class StoreValidationError(PolicyError):
    """A document was rejected on write; nothing was stored"""

    def __init__(self, message: str, cause: Optional[Exception] = None):
        self.cause = cause
        super().__init__(message if cause is None else f"{message}: {cause}")


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _parse_time(value: Optional[str]) -> Optional[datetime]:
    if not value:
        return None
    parsed = date_parser.isoparse(value)
    return parsed if parsed.tzinfo else parsed.replace(tzinfo=timezone.utc)


def _policy_path(uri: str) -> str:
    digest = hashlib.sha256(uri.encode("utf-8")).hexdigest()
    return f"policies/{digest[:2]}/{digest}.ttl"


class PolicyStore:
    """
    Policy store rooted at a directory

    Layout:
        manifest.json                 index of every record
        policies/<hh>/<sha256>.ttl    one data policy per data uri
        apps/<registration_id>.ttl    one registered app policy per id
    """

    def __init__(self, root: Union[str, Path], registration_ttl: int = DEFAULT_TTL):
        self.root = Path(root)
        self.registration_ttl = registration_ttl
        self._lock = threading.RLock()
        self.root.mkdir(parents=True, exist_ok=True)
        self._manifest = self._load_manifest()
        logger.info(
            f"Policy store at {self.root}: {len(self._manifest.policies)} policies, "
            f"{len(self._manifest.apps)} registrations"
        )

    def _load_manifest(self) -> Manifest:
        path = self.root / MANIFEST_FILE
        if not path.exists():
            return Manifest()
        raw = json.loads(path.read_text(encoding="utf-8"))

        def entries(section: Dict[str, Any]) -> Dict[str, ManifestEntry]:
            return {
                key: ManifestEntry(
                    file=value["file"],
                    created_at=_parse_time(value["created_at"]),
                    provenance=Provenance(**value["provenance"]) if value.get("provenance") else None,
                    expires_at=_parse_time(value.get("expires_at")),
                )
                for key, value in section.items()
            }

        return Manifest(
            version=raw.get("version", 1),
            policies=entries(raw.get("policies", {})),
            apps=entries(raw.get("apps", {})),
        )

    def _write_atomic(self, relative: str, text: str) -> None:
        target = self.root / relative
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".tmp-", suffix=target.suffix)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _save_manifest(self) -> None:
        def section(entries: Dict[str, ManifestEntry]) -> Dict[str, Any]:
            return {
                key: {
                    "file": entry.file,
                    "created_at": entry.created_at.isoformat(),
                    "provenance": entry.provenance.model_dump() if entry.provenance else None,
                    "expires_at": entry.expires_at.isoformat() if entry.expires_at else None,
                }
                for key, entry in sorted(entries.items())
            }

        payload = {
            "version": self._manifest.version,
            "policies": section(self._manifest.policies),
            "apps": section(self._manifest.apps),
        }
        self._write_atomic(MANIFEST_FILE, json.dumps(payload, indent=2, ensure_ascii=False))

    def _read(self, relative: str) -> Optional[str]:
        try:
            return (self.root / relative).read_text(encoding="utf-8")
        except FileNotFoundError:
            logger.warning(f"Store file {relative} listed in the manifest is missing")
            return None

    def put_policy(self, uri: str, document: str, provenance: Optional[Provenance] = None) -> PolicyRecord:
        """
        Store (or atomically replace) the data policy of `uri`

        Args:
            uri: Data IRI the policy governs
            document: Turtle document with exactly one data policy set for `uri`
            provenance: App and output port, for derived policies

        Returns:
            The stored record

        Raises:
            StoreValidationError: the document does not parse or does not hold
                exactly one data policy set for `uri`
        """
        try:
            policy_sets = extract_data_policies(parse_turtle(document))
        except DToUError as e:
            raise StoreValidationError(f"Rejected data policy for {uri}", e) from e
        if len(policy_sets) != 1:
            raise StoreValidationError(f"Expected exactly one data policy set for {uri}, found {len(policy_sets)}")
        if policy_sets[0].uri != URIRef(uri):
            raise StoreValidationError(f"Document governs {policy_sets[0].uri}, not {uri}")

        entry = ManifestEntry(file=_policy_path(uri), created_at=_utcnow(), provenance=provenance)
        with self._lock:
            self._write_atomic(entry.file, document)
            self._manifest.policies[uri] = entry
            self._save_manifest()
        logger.info(f"Stored data policy for {uri}" + (f" (derived by {provenance.app_name})" if provenance else ""))
        return PolicyRecord(data_uri=uri, policy_document=document, created_at=entry.created_at,
                            provenance=provenance)

    def get_policy(self, uri: str) -> Optional[PolicyRecord]:
        """Stored record for `uri`, or None"""
        with self._lock:
            entry = self._manifest.policies.get(uri)
            if entry is None:
                return None
            document = self._read(entry.file)
        if document is None:
            return None
        return PolicyRecord(data_uri=uri, policy_document=document, created_at=entry.created_at,
                            provenance=entry.provenance)

    def list_policies(self) -> List[PolicyRecord]:
        """Every stored record, ordered by data uri"""
        with self._lock:
            uris = sorted(self._manifest.policies)
        records = [self.get_policy(uri) for uri in uris]
        return [record for record in records if record is not None]

    def register_app(self, document: str) -> AppRegistration:
        """
        Register an app policy under a fresh id

        Raises:
            StoreValidationError: the document does not hold exactly one app policy
        """
        try:
            extract_app_policy(parse_turtle(document))
        except DToUError as e:
            raise StoreValidationError("Rejected app policy", e) from e

        registration_id = secrets.token_hex(16)
        registered_at = _utcnow()
        entry = ManifestEntry(
            file=f"apps/{registration_id}.ttl",
            created_at=registered_at,
            expires_at=registered_at + timedelta(seconds=self.registration_ttl),
        )
        with self._lock:
            self._write_atomic(entry.file, document)
            self._manifest.apps[registration_id] = entry
            self._save_manifest()
        logger.info(f"Registered app policy: registration_id={registration_id}")
        return AppRegistration(registration_id=registration_id, app_policy_document=document,
                               registered_at=registered_at, expires_at=entry.expires_at)

    def get_app(self, registration_id: str) -> Optional[AppRegistration]:
        """Registration for `registration_id`, or None when unknown or expired"""
        with self._lock:
            entry = self._manifest.apps.get(registration_id)
            if entry is None:
                return None
            document = self._read(entry.file)
        if document is None:
            return None
        registration = AppRegistration(
            registration_id=registration_id, app_policy_document=document,
            registered_at=entry.created_at, expires_at=entry.expires_at,
        )
        if registration.is_expired():
            logger.warning(f"Registration {registration_id} expired at {entry.expires_at.isoformat()}")
            return None
        return registration

    def purge_expired(self) -> int:
        """Remove expired registrations; returns how many were removed"""
        now = _utcnow()
        with self._lock:
            expired = [key for key, entry in self._manifest.apps.items()
                       if entry.expires_at is not None and entry.expires_at <= now]
            for key in expired:
                entry = self._manifest.apps.pop(key)
                (self.root / entry.file).unlink(missing_ok=True)
            if expired:
                self._save_manifest()
        if expired:
            logger.info(f"Purged {len(expired)} expired registrations")
        return len(expired)


# Global store instance (set during app startup)
_store_instance: Optional[PolicyStore] = None


def get_store() -> PolicyStore:
    """Get store instance"""
    global _store_instance
    if _store_instance is None:
        raise RuntimeError("Store not initialized. Call init_store() first.")
    return _store_instance


def init_store(root: Union[str, Path], registration_ttl: int = DEFAULT_TTL) -> PolicyStore:
    """
    Initialize the global store instance

    Args:
        root: Store directory (created when missing)
        registration_ttl: Registration lifetime in seconds

    Returns:
        PolicyStore instance
    """
    global _store_instance
    _store_instance = PolicyStore(root, registration_ttl)
    return _store_instance
