"""HTTP API over a loaded shape index (FastAPI).

The index is immutable for the lifetime of the app; the only mutable session
state is the table of ingested external embeddings.  Errors are returned as
{"code": ..., "message": ...} JSON bodies.
"""

from __future__ import annotations

import io
import threading

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import errors, geometry, rasterizer
from .index_store import ExternalEmbedding, ExternalTable, ShapeIndex
from .manifold import project_2d
from .retrieval import blend_retrieve, query_from_json

_BAD_REQUEST = (
    ValueError,
    KeyError,
    errors.UnknownPartError,
    errors.UnknownSourceError,
    errors.DimensionError,
)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"code": code, "message": message}, status_code=status)


def create_app(index: ShapeIndex, static_dir=None, cors_origins=("*",)) -> FastAPI:
    app = FastAPI(title="partblend", version="0.1.0")
    table = ExternalTable(index)
    table_lock = threading.Lock()
    mesh_cache: dict[int, object] = {}
    viewpoints = rasterizer.dodecahedron_viewpoints()

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "shapes": index.n_shapes}

    @app.get("/api/meta")
    def meta():
        return {
            "parts": list(index.label_set),
            "shape_count": index.n_shapes,
            "shapes": [{"id": s.id, "name": s.name} for s in index.shapes],
            "dim": index.manifolds[index.label_set[0]].dim,
            "fingerprint": index.fingerprint,
        }

    @app.get("/api/manifold/{part}")
    def manifold_view(part: str, projection: str = "2d"):
        if part not in index.label_set:
            return _error(404, "unknown_part", f"unknown part {part!r}")
        if projection != "2d":
            return _error(400, "bad_projection", f"unsupported projection {projection!r}")
        xy = project_2d(index.manifolds[part])
        return [
            {"id": s.id, "name": s.name, "x": float(x), "y": float(y)}
            for s, (x, y) in zip(index.shapes, xy)
        ]

    def _load_parts(shape_id: int):
        if shape_id not in mesh_cache:
            src = index.shapes[shape_id].source_path
            if not src:
                return None
            mesh = geometry.load_mesh(src, fmt="json")
            normalized, _tf = geometry.normalize(mesh)
            mesh_cache[shape_id] = geometry.split_parts(normalized)
        return mesh_cache[shape_id]

    @app.get("/api/shape/{shape_id}/silhouette/{view}")
    def silhouette(shape_id: int, view: int, part: str = "", format: str = "png"):
        if not 0 <= shape_id < index.n_shapes:
            return _error(404, "unknown_shape", f"unknown shape {shape_id}")
        if not 0 <= view < rasterizer.N_VIEWS:
            return _error(404, "unknown_view", f"view must be 0..{rasterizer.N_VIEWS - 1}")
        if part and part not in index.label_set:
            return _error(404, "unknown_part", f"unknown part {part!r}")
        parts = _load_parts(shape_id)
        if parts is None:
            return _error(404, "no_geometry", "index has no source meshes")
        if part:
            mesh = parts[part]
        else:
            # whole object: union of the parts' silhouettes
            img = None
            for m in parts.values():
                s = rasterizer.render_silhouette(m, viewpoints[view], 128)
                img = s.bits if img is None else (img | s.bits)
            return _image_response(rasterizer.SilhouetteImage(img), format)
        img = rasterizer.render_silhouette(mesh, viewpoints[view], 128)
        return _image_response(img, format)

    def _image_response(img: rasterizer.SilhouetteImage, format: str):
        if format == "pgm":
            return Response(img.to_pgm(), media_type="image/x-portable-graymap")
        from PIL import Image

        buf = io.BytesIO()
        Image.fromarray((img.bits * 255).astype("uint8"), mode="L").save(buf, "PNG")
        return Response(buf.getvalue(), media_type="image/png")

    @app.post("/api/query")
    async def query(request: Request):
        try:
            body = await request.json()
            q = query_from_json(body)
            results = blend_retrieve(index, q, externals=table)
        except _BAD_REQUEST as exc:
            return _error(400, "bad_query", str(exc))
        except errors.EmptyIndexError as exc:
            return _error(409, "empty_index", str(exc))
        return {"results": [r.to_dict() for r in results]}

    @app.post("/api/external")
    async def external(request: Request):
        try:
            body = await request.json()
            rec = ExternalEmbedding(body["id"], body["parts"], body.get("note", ""))
            with table_lock:
                table.register(rec)
        except errors.DuplicateIdError as exc:
            return _error(409, "duplicate_id", str(exc))
        except _BAD_REQUEST as exc:
            return _error(400, "bad_embedding", str(exc))
        return {"registered": body["id"]}

    if static_dir:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve(index: ShapeIndex, port: int = 8080, static_dir=None, host: str = "127.0.0.1"):
    """Run the API with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(index, static_dir), host=host, port=port, log_level="info")
