# backend/routes/reports.py
from __future__ import annotations

import logging

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field, model_validator

from essence_kit import __version__
from essence_kit.capsearch import build_decomposition, find_bounded_height_caps
from essence_kit.config import get_settings
from essence_kit.diagram import classify_diagram, parse_state
from essence_kit.errors import (
    BudgetExceeded,
    DiagramParseError,
    DiagramValidationError,
    EssenceKitError,
    HypothesisError,
    NotColorableError,
    UsageError,
)
from essence_kit.essence import (
    checkerboard_bounds_report,
    end_essential_report,
    essence_alternating_checkerboard,
    essence_state_surface,
)
from essence_kit.generators import diagram_from_text

router = APIRouter()

# ---- error mapping ----
_STATUS = (
    ((DiagramParseError, DiagramValidationError, NotColorableError, UsageError), 422),
    ((HypothesisError,), 409),
    ((BudgetExceeded,), 507),
)


def _http(exc: EssenceKitError) -> HTTPException:
    for kinds, status in _STATUS:
        if isinstance(exc, kinds):
            detail = {"error": type(exc).__name__, "message": str(exc)}
            if isinstance(exc, HypothesisError):
                detail["failed"] = list(exc.failed)
            return HTTPException(status, detail)
    logging.exception("essence-kit error")
    return HTTPException(500, f"{type(exc).__name__}: {exc}")


def _guarded(fn, *args):
    try:
        return fn(*args)
    except EssenceKitError as e:
        raise _http(e) from e
    except Exception as e:
        logging.exception("unexpected report failure")
        raise HTTPException(500, f"Internal error: {e}") from e


# ---- request bodies ----
class DiagramReq(BaseModel):
    pd: str = Field(..., description="PD text (X a b c d ...) or a JSON diagram document")


class EssenceReq(DiagramReq):
    color: str | None = Field(None, pattern=r"^(black|white)$", description="Checkerboard surface color")
    state: str | None = Field(None, description="allA, allB, seifert or one A/B label per crossing")

    @model_validator(mode="after")
    def _one_surface(self):
        if (self.color is None) == (self.state is None):
            raise ValueError("give exactly one of color and state")
        return self


class CapsearchReq(DiagramReq):
    color: str = Field("black", pattern=r"^(black|white)$")
    height: int = Field(2, ge=0, le=6, description="Largest subdisk height")
    mode: str = Field("geometric", pattern=r"^(geometric|boundary|algebraic)$")
    max_l: int | None = Field(None, ge=0, description="Link touches allowed per cap; boundary mode defaults to the settings limit")


# ---- routes ----
@router.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@router.post("/classify")
def classify(req: DiagramReq):
    def run():
        diagram = diagram_from_text(req.pd)
        flags = classify_diagram(diagram)
        return {"crossings": diagram.n, "components": diagram.component_count, "summary": flags.summary(), **flags.as_dict()}
    return _guarded(run)


@router.post("/essence")
def essence(req: EssenceReq):
    def run():
        diagram = diagram_from_text(req.pd)
        if req.color:
            try:
                report = essence_alternating_checkerboard(diagram, req.color)
            except HypothesisError:
                report = checkerboard_bounds_report(diagram, req.color)
            return {**report.as_dict(), "summary": report.summary()}
        state = parse_state(req.state, diagram)
        report = essence_state_surface(diagram, state)
        return {
            **report.as_dict(),
            "summary": report.summary(),
            "end_essential": end_essential_report(diagram, state).as_dict(),
        }
    return _guarded(run)


@router.post("/capsearch")
def capsearch(req: CapsearchReq):
    def run():
        decomp = build_decomposition(diagram_from_text(req.pd), req.color)
        result = find_bounded_height_caps(decomp, req.height, req.mode, req.max_l, get_settings())
        return {**result.as_json(), "summary": result.summary()}
    return _guarded(run)
