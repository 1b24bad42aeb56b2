"""HTTP API over a snapshot: meta, district and school maps, custom layers.

All query parameters arrive as optional strings and are validated by hand,
so any malformed client input maps to a 4xx with a machine code and a
human message; handlers never surface a 500 for bad input. Map responses
are canonical bytes carrying strong ETags derived from the snapshot digest
(or the registry digest for layer routes).
"""

from __future__ import annotations

import hashlib
import logging
from typing import Callable

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .custom import (
    DUPLICATE_LAYER_NAME,
    MAX_UPLOAD_BYTES,
    TOO_LARGE,
    ConversionTable,
    LayerRegistry,
    UploadError,
    build_layer,
    parse_custom_table,
    validate_upload,
)
from .geo import (
    ClusterCache,
    ClusterConfig,
    ClusterIndex,
    MapQuery,
    UnknownCounty,
    ZoomOutOfRange,
    district_features,
    geojson_bytes,
    layer_features,
    project,
    school_features,
    select_sites,
)
from .ingest import Snapshot
from .model import Assessment, Grade, parse_assessment, parse_grade

logger = logging.getLogger("fitmap.server")

GRADES = [int(g) for g in Grade]
ASSESSMENTS = [a.value for a in Assessment]

_UPLOAD_STATUS = {TOO_LARGE: 413, DUPLICATE_LAYER_NAME: 409}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _require(value: str | None, name: str) -> str:
    if value is None or value.strip() == "":
        raise ApiError(400, "MissingParam", f"query parameter {name!r} is required")
    return value.strip()


def _parse_year(text: str | None) -> int:
    raw = _require(text, "year")
    try:
        return int(raw)
    except ValueError:
        raise ApiError(422, "BadEnum", f"year must be an integer, got {raw!r}") from None


def _parse_grade(text: str | None) -> Grade:
    raw = _require(text, "grade")
    try:
        return parse_grade(raw)
    except ValueError:
        raise ApiError(
            422, "BadEnum", f"grade must be one of {GRADES}, got {raw!r}"
        ) from None


def _parse_assessment(text: str | None) -> Assessment:
    raw = _require(text, "assessment")
    try:
        return parse_assessment(raw)
    except ValueError:
        raise ApiError(
            422, "BadEnum", f"assessment must be one of {ASSESSMENTS}, got {raw!r}"
        ) from None


def _parse_counties(text: str | None) -> tuple[str, ...] | None:
    if text is None or text.strip() == "":
        return None
    names = tuple(sorted({part.strip() for part in text.split(",") if part.strip()}))
    return names or None


def _parse_zoom(text: str | None, max_zoom: int) -> int:
    raw = _require(text, "zoom")
    try:
        zoom = int(raw)
    except ValueError:
        raise ApiError(
            422, "ZoomOutOfRange", f"zoom must be an integer, got {raw!r}"
        ) from None
    if not 0 <= zoom <= max_zoom:
        raise ApiError(422, "ZoomOutOfRange", f"zoom {zoom} outside [0, {max_zoom}]")
    return zoom


def _parse_bbox(text: str | None) -> tuple[float, float, float, float] | None:
    if text is None or text.strip() == "":
        return None
    parts = text.split(",")
    if len(parts) != 4:
        raise ApiError(
            422, "BadBbox", "bbox must be 'minLon,minLat,maxLon,maxLat'"
        )
    try:
        min_lon, min_lat, max_lon, max_lat = (float(p) for p in parts)
    except ValueError:
        raise ApiError(422, "BadBbox", f"bbox has a non-numeric part: {text!r}") from None
    values = (min_lon, min_lat, max_lon, max_lat)
    if any(v != v or v in (float("inf"), float("-inf")) for v in values):
        raise ApiError(422, "BadBbox", "bbox parts must be finite")
    if min_lon > max_lon or min_lat > max_lat:
        raise ApiError(422, "BadBbox", "bbox minimums must not exceed maximums")
    return values


def _etag_of(*parts: str) -> str:
    return '"' + hashlib.sha256("|".join(parts).encode("utf-8")).hexdigest() + '"'


def _maybe_304(request: Request, etag: str) -> Response | None:
    got = request.headers.get("if-none-match")
    if got is None:
        return None
    candidates = {piece.strip().removeprefix("W/") for piece in got.split(",")}
    if etag in candidates or "*" in candidates:
        return Response(status_code=304, headers={"ETag": etag})
    return None


def create_app(
    snapshot: Snapshot,
    registry: LayerRegistry,
    conversion: ConversionTable | None = None,
    static_dir: str | None = None,
    cors_origins: list[str] | None = None,
    cluster_config: ClusterConfig | None = None,
) -> FastAPI:
    config = cluster_config or ClusterConfig()
    cache = ClusterCache()
    app = FastAPI(title="fitmap", docs_url=None, redoc_url=None, openapi_url=None)

    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "MissingParam", "message": str(exc.errors()[:1])},
        )

    @app.exception_handler(Exception)
    async def on_unhandled(request: Request, exc: Exception):
        logger.exception("unhandled error for %s %s", request.method, request.url)
        return JSONResponse(
            status_code=500, content={"code": "Internal", "message": "internal error"}
        )

    @app.middleware("http")
    async def log_request(request: Request, call_next: Callable):
        response = await call_next(request)
        logger.info("%s %s -> %s", request.method, request.url.path, response.status_code)
        return response

    def map_query(year: str | None, grade: str | None, assessment: str | None,
                  counties: str | None) -> MapQuery:
        return MapQuery(
            year=_parse_year(year),
            grade=_parse_grade(grade),
            assessment=_parse_assessment(assessment),
            counties=_parse_counties(counties),
        )

    @app.get("/api/meta")
    async def get_meta(request: Request):
        etag = _etag_of("meta", snapshot.digest)
        cached = _maybe_304(request, etag)
        if cached is not None:
            return cached
        body = {
            "years": list(snapshot.manifest.years),
            "grades": GRADES,
            "assessments": ASSESSMENTS,
            "counties": list(snapshot.manifest.counties),
        }
        return JSONResponse(content=body, headers={"ETag": etag})

    @app.get("/api/districts")
    async def get_districts(
        request: Request,
        year: str | None = None,
        grade: str | None = None,
        assessment: str | None = None,
        counties: str | None = None,
    ):
        query = map_query(year, grade, assessment, counties)
        etag = _etag_of("districts", snapshot.digest, repr(query))
        cached = _maybe_304(request, etag)
        if cached is not None:
            return cached
        try:
            collection = district_features(snapshot, query)
        except UnknownCounty as exc:
            raise ApiError(400, exc.code, str(exc)) from exc
        return Response(
            content=geojson_bytes(collection),
            media_type="application/geo+json",
            headers={"ETag": etag},
        )

    @app.get("/api/schools")
    async def get_schools(
        request: Request,
        year: str | None = None,
        grade: str | None = None,
        assessment: str | None = None,
        counties: str | None = None,
        zoom: str | None = None,
        bbox: str | None = None,
    ):
        query = map_query(year, grade, assessment, counties)
        zoom_level = _parse_zoom(zoom, config.max_zoom)
        box = _parse_bbox(bbox)
        etag = _etag_of("schools", snapshot.digest, repr(query), str(zoom_level), repr(box))
        cached = _maybe_304(request, etag)
        if cached is not None:
            return cached
        key = (snapshot.digest, query, box)

        def build() -> ClusterIndex:
            sites, _ = select_sites(snapshot, query, box)
            return ClusterIndex([project(s.lon, s.lat) for s in sites], config)

        try:
            index = cache.get_or_build(key, build)
            collection = school_features(
                snapshot, query, zoom_level, box, config=config, index=index
            )
        except UnknownCounty as exc:
            raise ApiError(400, exc.code, str(exc)) from exc
        except ZoomOutOfRange as exc:
            raise ApiError(422, exc.code, str(exc)) from exc
        return Response(
            content=geojson_bytes(collection),
            media_type="application/geo+json",
            headers={"ETag": etag},
        )

    @app.get("/api/layers")
    async def list_layers(request: Request):
        etag = _etag_of("layers", registry.digest)
        cached = _maybe_304(request, etag)
        if cached is not None:
            return cached
        return JSONResponse(content=registry.names(), headers={"ETag": etag})

    @app.post("/api/layers", status_code=201)
    async def create_layer(
        file: UploadFile | None = File(None), name: str | None = Form(None)
    ):
        if name is None or not name.strip():
            raise ApiError(400, "MissingParam", "form field 'name' is required")
        if file is None:
            raise ApiError(400, "MissingParam", "form field 'file' is required")
        data = await file.read(MAX_UPLOAD_BYTES + 1)
        try:
            validate_upload(file.filename or "", len(data), name.strip(), registry.names())
            table = parse_custom_table(data)
            layer = build_layer(name.strip(), table, conversion, snapshot.boundaries)
            registry.add(layer)
        except UploadError as exc:
            raise ApiError(_UPLOAD_STATUS.get(exc.kind, 422), exc.kind, exc.detail) from exc
        return {
            "name": layer.name,
            "join_stats": layer.join_stats.to_json(),
            "skipped_non_numeric": layer.skipped_non_numeric,
        }

    @app.get("/api/layers/{name}")
    async def get_layer(name: str, request: Request, format: str | None = None):
        layer = registry.get(name)
        if layer is None:
            raise ApiError(404, "UnknownLayer", f"no layer named {name!r}")
        etag = _etag_of("layer", name, registry.digest)
        cached = _maybe_304(request, etag)
        if cached is not None:
            return cached
        if format == "geojson":
            collection = layer_features(layer, snapshot.boundaries)
            return Response(
                content=geojson_bytes(collection),
                media_type="application/geo+json",
                headers={"ETag": etag},
            )
        body = {
            "name": layer.name,
            "created_at": layer.created_at,
            "join_stats": layer.join_stats.to_json(),
            "skipped_non_numeric": layer.skipped_non_numeric,
        }
        return JSONResponse(content=body, headers={"ETag": etag})

    @app.delete("/api/layers/{name}", status_code=204)
    async def delete_layer(name: str):
        if not registry.delete(name):
            raise ApiError(404, "UnknownLayer", f"no layer named {name!r}")
        return Response(status_code=204)

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
