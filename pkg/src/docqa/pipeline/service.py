"""Read-only HTTP front end over a shared Engine.

Filter bodies mirror the schema: categorical fields take a list of values,
real and timestamp fields take {"min": ..., "max": ...} with either bound
optional.  Timestamp bounds accept ISO-8601 strings.
"""

from __future__ import annotations

from dataclasses import asdict

from fastapi import Body, FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..corpus.io import parse_timestamp
from ..corpus.types import Corpus
from ..errors import FilterError, NoCandidateDocumentsError
from ..retrieval.filters import MetadataFilter, RangeClause, ValueClause
from .engine import MODES, Engine


def _bound(field: str, kind: str, value, side: str) -> float | None:
    if value is None:
        return None
    if kind == "timestamp":
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        parsed = parse_timestamp(value) if isinstance(value, str) else None
        if parsed is None:
            raise FilterError(f"filter '{field}': {side} is not a valid timestamp: {value!r}")
        return parsed
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FilterError(f"filter '{field}': {side} must be a number, got {value!r}")
    return float(value)


def build_filter(corpus: Corpus, filters: dict) -> MetadataFilter:
    """Turn a request filter body into clauses, checking against the schema."""
    clauses = {}
    for field, spec in filters.items():
        kind = corpus.schema.fields.get(field)
        if kind is None:
            raise FilterError(f"unknown filter field '{field}'")
        if isinstance(spec, list):
            if kind.kind != "categorical":
                raise FilterError(f"filter '{field}': value lists only apply to categorical fields")
            if not spec or not all(isinstance(v, str) for v in spec):
                raise FilterError(f"filter '{field}': expected a non-empty list of strings")
            clauses[field] = ValueClause(values=frozenset(spec))
        elif isinstance(spec, dict):
            if kind.kind == "categorical":
                raise FilterError(f"filter '{field}': bounds do not apply to categorical fields")
            unknown = sorted(set(spec) - {"min", "max"})
            if unknown:
                raise FilterError(f"filter '{field}': unknown bound keys {unknown}")
            lower = _bound(field, kind.kind, spec.get("min"), "min")
            upper = _bound(field, kind.kind, spec.get("max"), "max")
            if lower is None and upper is None:
                raise FilterError(f"filter '{field}': at least one of min/max is required")
            clauses[field] = RangeClause(lower=lower, upper=upper)
        else:
            raise FilterError(f"filter '{field}': expected a value list or a min/max object")
    return MetadataFilter(clauses=clauses)


def render_schema(corpus: Corpus) -> dict:
    """Schema as the UI consumes it: categorical fields list their values,
    numeric and timestamp fields carry the observed bounds."""
    out = {}
    for field, kind in sorted(corpus.schema.fields.items()):
        if kind.kind == "categorical":
            out[field] = {"kind": "categorical", "values": sorted(kind.values)}
            continue
        observed = [doc.metadata[field] for doc in corpus if field in doc.metadata]
        if kind.kind == "timestamp":
            observed.sort(key=parse_timestamp)
        else:
            observed.sort()
        entry = {"kind": kind.kind}
        if observed:
            entry["min"] = observed[0]
            entry["max"] = observed[-1]
        out[field] = entry
    return out


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="docqa", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    def invalid_body(request, exc):
        return JSONResponse({"error": "request body must be a JSON object"}, status_code=400)

    @app.get("/schema")
    def get_schema():
        return render_schema(engine.corpus)

    @app.get("/documents/{doc_id}")
    def get_document(doc_id: str):
        doc = engine.corpus.get(doc_id)
        if doc is None:
            return JSONResponse({"error": f"unknown document '{doc_id}'"}, status_code=404)
        return {"id": doc.id, "title": doc.title, "text": doc.text, "metadata": doc.metadata}

    @app.post("/ask")
    def post_ask(body: dict = Body(...)):
        question = body.get("question")
        if not isinstance(question, str) or not question.strip():
            return JSONResponse({"error": "question must be a non-empty string"}, status_code=400)
        filters = body.get("filters", {})
        if not isinstance(filters, dict):
            return JSONResponse({"error": "filters must be an object"}, status_code=400)
        k = body.get("k")
        if k is not None and (isinstance(k, bool) or not isinstance(k, int) or k < 1):
            return JSONResponse({"error": "k must be a positive integer"}, status_code=400)
        mode = body.get("mode")
        if mode is not None and mode not in MODES:
            return JSONResponse({"error": f"mode must be one of {MODES}"}, status_code=400)
        try:
            metadata_filter = build_filter(engine.corpus, filters)
            response = engine.ask(question, metadata_filter=metadata_filter, k=k, mode=mode)
        except FilterError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        except NoCandidateDocumentsError as exc:
            return JSONResponse({"error": str(exc)}, status_code=409)
        payload = asdict(response)
        payload["retrieved"] = [{"doc_id": d, "score": s} for d, s in response.retrieved]
        return payload

    return app
