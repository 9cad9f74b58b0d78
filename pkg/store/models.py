"""
Store models
Records kept by the policy store and the manifest entries that index them
"""
from datetime import datetime, timezone
from typing import Dict, Optional

from pydantic import BaseModel, Field


class Provenance(BaseModel):
    """Where a derived policy came from"""
    app_name: str = Field(..., description="Name of the app policy that derived it")
    output_port: str = Field(..., description="Output port it was derived for")


class PolicyRecord(BaseModel):
    """A data uri and the Turtle document of its data policy"""
    data_uri: str = Field(..., description="IRI of the governed data")
    policy_document: str = Field(..., description="Turtle document holding exactly one data policy set for data_uri")
    created_at: datetime
    provenance: Optional[Provenance] = Field(default=None, description="Set for derived policies")

    class Config:
        """Pydantic config"""
        json_schema_extra = {
            "example": {
                "data_uri": "http://a.b/shoe-size",
                "policy_document": ":shoe-size a :Data; :uri <http://a.b/shoe-size>; :policy :policy-2. ...",
                "created_at": "2023-08-23T10:00:00+00:00",
                "provenance": None,
            }
        }


class AppRegistration(BaseModel):
    """Temporary record of a registered app policy"""
    registration_id: str = Field(..., description="128-bit random token, hex encoded")
    app_policy_document: str
    registered_at: datetime
    expires_at: datetime

    def is_expired(self, now: Optional[datetime] = None) -> bool:
        return (now or datetime.now(timezone.utc)) >= self.expires_at


class ManifestEntry(BaseModel):
    """Index entry; `file` is relative to the store root"""
    file: str
    created_at: datetime
    provenance: Optional[Provenance] = None
    expires_at: Optional[datetime] = None


class Manifest(BaseModel):
    version: int = 1
    policies: Dict[str, ManifestEntry] = Field(default_factory=dict)
    apps: Dict[str, ManifestEntry] = Field(default_factory=dict)
