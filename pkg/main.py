"""
FastAPI application for the DToU compliance service
Apps register their policy, then request conformance checks, obligation
checks and policy derivation against the data policies in the store
"""
import logging
import sys
from datetime import datetime

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field
from rdflib import URIRef

from config import Settings, load_settings
from policies import router as policies_router
from policy.errors import DerivationError, DToUError
from policy.to_graph import usage_context_graph
from reasoner.conformance import check_conformance
from reasoner.derivation import derive_policy
from reasoner.knowledge_base import assemble
from reasoner.models import KnowledgeBase
from reasoner.obligations import check_obligations
from reasoner.report import DERIVATION_USER, conformance_response, derivation_response, obligation_response
from store.models import Provenance
from store.store import StoreValidationError, init_store
from store.store_api import load_data_graphs, load_registration, store_policy

settings = load_settings()

# Configure logging
# Explicitly set output to stderr (terminal)
logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
    force=True
)

logger = logging.getLogger(__name__)

app = FastAPI(
    title="DToU Policy Engine",
    description="Conformance, obligation and derivation reasoning over Data Terms of Use policies",
    version="1.0.0",
    docs_url=None,
    redoc_url=None
)

app.state.settings = settings

# Include routers
app.include_router(policies_router)


@app.on_event("startup")
async def startup_event():
    """Reload settings and open the policy store"""
    try:
        current: Settings = load_settings()
        app.state.settings = current
        init_store(current.store_dir, current.registration_ttl)
        logger.info(f"Policy store initialized at {current.store_dir} (strict={current.strict})")
    except Exception as e:
        logger.error(f"Failed to initialize policy store: {e}")
        raise


class ReasoningRequest(BaseModel):
    """Body of the conformance and obligation endpoints"""
    registration_id: str = Field(..., description="Id returned by POST /dtou/app-policy")
    user: str = Field(..., description="WebID of the data user")
    time: str = Field(..., description="Time of use, carried into the usage context")


class DerivationRequest(BaseModel):
    """Body of the derivation endpoint"""
    registration_id: str = Field(..., description="Id returned by POST /dtou/app-policy")
    output_port: str = Field(..., description="Output port of the registered app policy")
    target_uri: str = Field(..., description="Data uri the derived policy is stored under")


def _knowledge_base(registration_id: str, user: str, time: str, enforce_strict: bool = True) -> KnowledgeBase:
    """
    Build the knowledge base of one request from the store

    Raises:
        HTTPException: 404 unknown registration, 409 uncovered input in strict mode
    """
    loaded = load_registration(registration_id)
    if loaded is None:
        raise HTTPException(status_code=404, detail=f"Unknown or expired registration {registration_id}")
    app_graph, app_policy = loaded
    data_graphs, missing = load_data_graphs(app_policy)

    current: Settings = app.state.settings
    if enforce_strict and current.strict and missing:
        raise HTTPException(status_code=409, detail=f"No data policy stored for {', '.join(missing)}")

    context_graph = usage_context_graph(URIRef(user), app_policy.id, time)
    return assemble(context_graph, app_graph, data_graphs, rdfs_closure=current.rdfs_closure)


@app.post("/dtou/conformance")
def conformance(request: ReasoningRequest):
    """
    Conformance check of a registered app for one usage context

    Returns:
        ConformanceResponse: permitted flag, conflicts, uncovered inputs
    """
    try:
        start = datetime.now()
        kb = _knowledge_base(request.registration_id, request.user, request.time)
        conflicts = check_conformance(kb)
        response = conformance_response(kb, conflicts, strict=app.state.settings.strict)
        logger.info(
            f"Conformance check registration_id={request.registration_id}: {len(conflicts)} conflicts, "
            f"permitted={response.permitted} in {(datetime.now() - start).total_seconds():.3f}s"
        )
        return response.model_dump()
    except HTTPException:
        raise
    except DToUError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error in conformance check: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal error")


@app.post("/dtou/obligations")
def obligations(request: ReasoningRequest):
    """
    Obligations activated by a registered app for one usage context

    Returns:
        ObligationResponse: activated obligations with resolved arguments
    """
    try:
        start = datetime.now()
        kb = _knowledge_base(request.registration_id, request.user, request.time)
        activated = check_obligations(kb)
        logger.info(
            f"Obligation check registration_id={request.registration_id}: {len(activated)} activated "
            f"in {(datetime.now() - start).total_seconds():.3f}s"
        )
        return obligation_response(kb, activated).model_dump()
    except HTTPException:
        raise
    except DToUError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error in obligation check: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal error")


@app.post("/dtou/derive")
def derive(request: DerivationRequest):
    """
    Derive the policy of an output port, store it under target_uri and echo it

    Returns:
        DerivationResponse: stored uri and the derived policy as Turtle
    """
    try:
        kb = _knowledge_base(request.registration_id, DERIVATION_USER, "", enforce_strict=False)
        derived = derive_policy(kb, request.output_port)
        response = derivation_response(derived, URIRef(request.target_uri))
        store_policy(
            request.target_uri,
            response.policy,
            Provenance(app_name=str(kb.app.name), output_port=request.output_port),
        )
        logger.info(
            f"Derived policy registration_id={request.registration_id} port={request.output_port!r} "
            f"stored at {request.target_uri}"
        )
        return response.model_dump()
    except HTTPException:
        raise
    except DerivationError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except StoreValidationError as e:
        logger.error(f"Derived policy failed validation: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail="Derived policy failed validation")
    except DToUError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error in policy derivation: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail="Internal error")


@app.get("/health")
async def health_check():
    return {"status": "ok"}


# Error handlers
@app.exception_handler(HTTPException)
async def http_exception_handler(request, exc):
    return JSONResponse(
        status_code=exc.status_code,
        content={"error": exc.detail, "status_code": exc.status_code}
    )
