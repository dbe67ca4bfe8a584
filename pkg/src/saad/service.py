"""Embedded HTTP service for the triage workflow: candidate queues,
annotation submission, agreement and FP dashboards, and the static web UI.

The server owns a read-only snapshot of corpus/detections/lexicon loaded at
startup; the annotation store is the only write path and serializes its
writes itself, so read handlers stay safe under concurrency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, HTTPException, Query
from fastapi.responses import FileResponse, HTMLResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .classify import TaxonomyType
from .detect import Detection
from .extract import CommentRecord
from .lexicon import InvalidPattern, Lexicon, compile_pattern
from .refine import (
    AnnotationRecord,
    AnnotationStore,
    AnnotationVerdict,
    read_history,
    resolve_verdicts,
)
from .stats import LengthMismatch, cohens_kappa

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>saad triage</title></head>
<body><h1>saad triage service</h1>
<p>No UI bundle configured. Start with <code>--ui &lt;dir&gt;</code> to serve
the web interface; the JSON API is live under <code>/api/</code>.</p>
</body></html>"""


@dataclass
class ServiceState:
    corpus: dict[str, CommentRecord]
    detections: list[Detection]
    lexicon: Lexicon
    store: AnnotationStore
    history_path: Optional[Path] = None
    fp_threshold: float = 0.25
    ui_dir: Optional[Path] = None
    detection_index: dict[str, Detection] = field(init=False)

    def __post_init__(self) -> None:
        self.detection_index = {d.comment_id: d for d in self.detections}


class AnnotationIn(BaseModel):
    comment_id: str
    annotator: str = ""
    verdict: str
    type: Optional[str] = None
    note: str = ""
    proposed_pattern: Optional[str] = None


def _candidate_view(state: ServiceState, det: Detection, annotated: bool) -> dict:
    record = state.corpus.get(det.comment_id)
    spans = [
        [raw, start, end]
        for raw, start, end in state.lexicon.pattern_spans(record.text)
        if raw in det.matched_patterns
    ] if record else []
    return {
        "comment_id": det.comment_id,
        "text": record.text if record else "",
        "kind": record.kind.value if record else "",
        "project_id": record.location.project_id if record else "",
        "file_path": record.location.file_path if record else "",
        "start_line": record.location.start_line if record else 0,
        "end_line": record.location.end_line if record else 0,
        "context_before": record.context_before if record else [],
        "context_after": record.context_after if record else [],
        "patterns": det.matched_patterns,
        "features": det.matched_features,
        "existing_aging": det.existing_aging_feature,
        "types": [t.value for t in det.taxonomy_types],
        "pattern_spans": spans,
        "annotated": annotated,
    }


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="saad triage service")

    @app.get("/api/candidates")
    def list_candidates(
        pattern: str = Query(default=""),
        type: str = Query(default=""),
        project: str = Query(default=""),
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=20, ge=1, le=500),
        x_annotator: str = Header(default=""),
    ) -> dict:
        try:
            type_filter = TaxonomyType(type) if type else None
        except ValueError:
            raise HTTPException(status_code=400, detail=f"unknown type {type!r}")
        verdicts = state.store.latest() if x_annotator else {}
        items = []
        for det in state.detections:
            if pattern and pattern not in det.matched_patterns:
                continue
            if type_filter and type_filter not in det.taxonomy_types:
                continue
            if project:
                record = state.corpus.get(det.comment_id)
                if record is None or record.location.project_id != project:
                    continue
            if x_annotator and (det.comment_id, x_annotator) in verdicts:
                continue
            items.append(det)
        items.sort(key=lambda d: d.comment_id)
        total = len(items)
        total_pages = max(1, math.ceil(total / page_size))
        start = (page - 1) * page_size
        page_items = items[start: start + page_size]
        return {
            "items": [_candidate_view(state, d, annotated=False) for d in page_items],
            "page": page,
            "page_size": page_size,
            "total": total,
            "total_pages": total_pages,
        }

    @app.post("/api/annotations")
    def submit_annotation(
        body: AnnotationIn,
        x_annotator: str = Header(default=""),
    ) -> dict:
        annotator = body.annotator or x_annotator
        if not annotator:
            raise HTTPException(status_code=400, detail="annotator required")
        if body.comment_id not in state.detection_index:
            raise HTTPException(
                status_code=404, detail=f"unknown comment {body.comment_id!r}"
            )
        try:
            verdict = AnnotationVerdict(body.verdict)
        except ValueError:
            raise HTTPException(status_code=422, detail=f"invalid verdict {body.verdict!r}")
        type_override = None
        if body.type:
            try:
                type_override = TaxonomyType(body.type)
            except ValueError:
                raise HTTPException(status_code=422, detail=f"unknown type {body.type!r}")
        if body.proposed_pattern:
            try:
                compile_pattern(body.proposed_pattern)
            except InvalidPattern as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        record = AnnotationRecord(
            comment_id=body.comment_id,
            annotator_id=annotator,
            verdict=verdict,
            type_override=type_override,
            note=body.note,
            proposed_pattern=body.proposed_pattern or None,
        )
        revision = state.store.append(record)
        return {"ok": True, "revision": revision}

    @app.get("/api/agreement")
    def agreement_report(a: str, b: str) -> dict:
        latest = state.store.latest()
        verdicts_a = {
            cid: rec.verdict.value
            for (cid, annotator), rec in latest.items()
            if annotator == a
        }
        verdicts_b = {
            cid: rec.verdict.value
            for (cid, annotator), rec in latest.items()
            if annotator == b
        }
        joint = sorted(set(verdicts_a) & set(verdicts_b))
        if not joint:
            raise HTTPException(
                status_code=404, detail=f"no jointly annotated items for {a!r} and {b!r}"
            )
        labels_a = [verdicts_a[cid] for cid in joint]
        labels_b = [verdicts_b[cid] for cid in joint]
        try:
            kappa = cohens_kappa(labels_a, labels_b)
        except LengthMismatch as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        table: dict[str, int] = {}
        for la, lb in zip(labels_a, labels_b):
            key = f"{la}|{lb}"
            table[key] = table.get(key, 0) + 1
        return {
            "a": a,
            "b": b,
            "n_joint": len(joint),
            "kappa": kappa,
            "contingency": table,
            "comment_ids": joint,
        }

    @app.get("/api/patterns/fp")
    def pattern_fp_rates() -> dict:
        verdicts = resolve_verdicts(state.store.load_all())
        rows = []
        for p in state.lexicon.patterns:
            matching = [
                d
                for d in state.detections
                if p.raw in d.matched_patterns and d.comment_id in verdicts
            ]
            rate = None
            if matching:
                non_saad = sum(
                    1
                    for d in matching
                    if verdicts[d.comment_id].verdict is AnnotationVerdict.NON_SAAD
                )
                rate = non_saad / len(matching)
            rows.append(
                {
                    "pattern": p.raw,
                    "type": p.taxonomy_type.value if p.taxonomy_type else None,
                    "status": p.status.value,
                    "annotated_matches": len(matching),
                    "fp_rate": rate,
                    "flagged": rate is not None and rate > state.fp_threshold,
                }
            )
        return {"fp_threshold": state.fp_threshold, "patterns": rows}

    @app.get("/api/iterations")
    def iterations() -> dict:
        history = (
            read_history(state.history_path)
            if state.history_path is not None
            else []
        )
        return {
            "iterations": [
                {
                    "iteration_no": it.iteration_no,
                    "active_pattern_count": it.active_pattern_count,
                    "total_saad_detected": it.total_saad_detected,
                    "sample_size": len(it.sample_ids),
                    "precision": it.precision,
                    "recall": it.recall,
                    "f1": it.f1,
                    "excluded_patterns": it.excluded_patterns,
                    "stopped": it.stopped,
                    "proposed_pattern_fraction": it.proposed_pattern_fraction,
                }
                for it in history
            ]
        }

    if state.ui_dir is not None and state.ui_dir.is_dir():
        index = state.ui_dir / "index.html"

        @app.get("/", response_class=FileResponse, include_in_schema=False)
        def ui_index() -> FileResponse:
            return FileResponse(index)

        app.mount("/", StaticFiles(directory=str(state.ui_dir)), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse, include_in_schema=False)
        def placeholder() -> str:
            return _PLACEHOLDER_PAGE

    return app
