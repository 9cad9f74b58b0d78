"""
Policies module: app registration and data policy storage endpoints
Uses store/store_api.py for store operations
"""
import logging
from typing import Any, Dict, List
from urllib.parse import unquote

from fastapi import APIRouter, HTTPException, Request
from fastapi.responses import PlainTextResponse
from starlette.concurrency import run_in_threadpool

from config import Settings
from store.store import StoreValidationError
from store.store_api import fetch_policy, list_policy_records, register_app_policy, store_policy

logger = logging.getLogger(__name__)

router = APIRouter()

TURTLE_MEDIA_TYPE = "text/turtle"


async def read_turtle_body(request: Request) -> str:
    """
    Request body as Turtle text

    Raises:
        HTTPException: 400 for an empty or non UTF-8 body, 413 over the size limit
    """
    settings: Settings = request.app.state.settings
    body = await request.body()
    if len(body) > settings.max_document_size:
        raise HTTPException(status_code=413, detail=f"Document exceeds {settings.max_document_size} bytes")
    if not body.strip():
        raise HTTPException(status_code=400, detail="Empty document")
    try:
        return body.decode("utf-8")
    except UnicodeDecodeError as e:
        raise HTTPException(status_code=400, detail=f"Document is not UTF-8: {e}")


@router.post("/dtou/app-policy")
async def register_app(request: Request) -> Dict[str, Any]:
    """
    Register an app policy

    Body: Turtle document holding exactly one :AppPolicy

    Returns:
        Registration id and expiry
    """
    document = await read_turtle_body(request)
    try:
        registration = await run_in_threadpool(register_app_policy, document)
    except StoreValidationError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error registering app policy: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal error")
    return {
        "registration_id": registration.registration_id,
        "expires_at": registration.expires_at.isoformat(),
    }


@router.get("/dtou/policies")
def list_policies() -> List[Dict[str, Any]]:
    """Stored data policies: uri, creation time and provenance"""
    return [
        {
            "data_uri": record.data_uri,
            "created_at": record.created_at.isoformat(),
            "provenance": record.provenance.model_dump() if record.provenance else None,
        }
        for record in list_policy_records()
    ]


@router.get("/dtou/policy/{uri:path}")
def get_policy(uri: str) -> PlainTextResponse:
    """Turtle document of the data policy stored for `uri` (percent-encoded in the path)"""
    record = fetch_policy(unquote(uri))
    if record is None:
        raise HTTPException(status_code=404, detail=f"No data policy stored for {unquote(uri)}")
    return PlainTextResponse(record.policy_document, media_type=TURTLE_MEDIA_TYPE)


@router.put("/dtou/policy/{uri:path}")
async def put_policy(uri: str, request: Request) -> Dict[str, Any]:
    """
    Store the data policy of `uri`

    Body: Turtle document with one data policy set whose :uri is `uri`
    """
    document = await read_turtle_body(request)
    data_uri = unquote(uri)
    try:
        record = await run_in_threadpool(store_policy, data_uri, document)
    except StoreValidationError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error storing data policy for {data_uri}: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal error")
    return {"data_uri": record.data_uri, "created_at": record.created_at.isoformat()}
