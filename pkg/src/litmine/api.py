"""HTTP facade. Every route delegates to one Service or Store operation;
errors surface as {code, message, detail} with the status class the
error type carries."""

from __future__ import annotations

from fastapi import BackgroundTasks, Body, Depends, FastAPI, UploadFile
from fastapi.responses import JSONResponse, Response
from fastapi.security import HTTPAuthorizationCredentials, HTTPBearer

from .adapters import build_adapters, page_payload
from .config import AppConfig, load_config
from .errors import AuthenticationError, LitmineError
from .serde import (
    document_dataset_to_dict,
    header_to_dict,
    label_config_from_dict,
    label_config_to_dict,
    map_to_dict,
    mapping_to_dict,
    project_dataset_to_dict,
    span_to_dict,
    table_to_dict,
)
from .service import Service
from .store import Store
from .tabular import CSV_MEDIA, XLSX_MEDIA

NDJSON_MEDIA = "application/x-ndjson"

_bearer = HTTPBearer(auto_error=False)


def _export_media(fmt: str) -> str:
    return XLSX_MEDIA if fmt == "xlsx" else CSV_MEDIA


def create_app(service: Service) -> FastAPI:
    app = FastAPI(title="litmine", docs_url=None, redoc_url=None)
    store = service.store

    @app.exception_handler(LitmineError)
    async def litmine_error(request, exc: LitmineError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"code": exc.code, "message": exc.message,
                     "detail": exc.detail})

    def current_user(
            creds: HTTPAuthorizationCredentials | None = Depends(_bearer),
    ) -> str:
        if creds is None:
            raise AuthenticationError("missing bearer token")
        return store.session_user(creds.credentials)

    def current_token(
            creds: HTTPAuthorizationCredentials | None = Depends(_bearer),
    ) -> str:
        if creds is None:
            raise AuthenticationError("missing bearer token")
        store.session_user(creds.credentials)
        return creds.credentials

    # -------------------------------------------------------------- auth

    @app.post("/auth/register", status_code=201)
    def register(body: dict = Body(...)):
        return store.create_user(body.get("display_name", ""),
                                 body.get("password", ""))

    @app.post("/auth/login")
    def login(body: dict = Body(...)):
        user = store.authenticate(body.get("display_name", ""),
                                  body.get("password", ""))
        session = store.create_session(user["user_id"])
        session["display_name"] = user["display_name"]
        return session

    @app.post("/auth/logout")
    def logout(token: str = Depends(current_token)):
        store.delete_session(token)
        return {"ok": True}

    # ----------------------------------------------------------- projects

    @app.post("/projects", status_code=201)
    def create_project(body: dict = Body(...),
                       user: str = Depends(current_user)):
        return store.create_project(body.get("name", ""),
                                    body.get("description", ""), user)

    @app.get("/projects")
    def list_projects(user: str = Depends(current_user)):
        return store.list_projects()

    @app.get("/projects/{project_id}")
    def get_project(project_id: str, user: str = Depends(current_user)):
        return store.get_project(project_id)

    @app.put("/projects/{project_id}/settings")
    def update_settings(project_id: str, body: dict = Body(...),
                        user: str = Depends(current_user)):
        labels = None
        if "labels" in body:
            labels = [label_config_from_dict(d) for d in body["labels"]]
        return store.update_settings(
            project_id, name=body.get("name"),
            description=body.get("description"), labels=labels)

    @app.get("/projects/{project_id}/labels")
    def get_labels(project_id: str, user: str = Depends(current_user)):
        return [label_config_to_dict(c)
                for c in store.project_labels(project_id)]

    @app.get("/projects/{project_id}/header")
    def get_header(project_id: str, user: str = Depends(current_user)):
        header = store.project_header(project_id)
        return {"header": header_to_dict(header) if header else None}

    @app.put("/projects/{project_id}/header")
    def put_header(project_id: str, body: dict = Body(...),
                   user: str = Depends(current_user)):
        return service.edit_project_header(project_id,
                                           body.get("edits", []), user)

    @app.post("/projects/{project_id}/header/upload")
    async def upload_header(project_id: str, file: UploadFile,
                            user: str = Depends(current_user)):
        data = await file.read()
        return service.upload_header(project_id, file.filename or "", data,
                                     user)

    # -------------------------------------------------------------- files

    @app.post("/projects/{project_id}/files", status_code=202)
    async def upload_file(project_id: str, file: UploadFile,
                          background: BackgroundTasks,
                          user: str = Depends(current_user)):
        data = await file.read()
        record = service.upload(project_id, file.filename or "upload.pdf",
                                data, user)
        background.add_task(service.parse_file, record["file_id"])
        return record

    @app.get("/projects/{project_id}/files")
    def list_files(project_id: str, user: str = Depends(current_user)):
        return store.list_files(project_id)

    @app.get("/projects/{project_id}/files/search")
    def search_files(project_id: str, q: str = "",
                     user: str = Depends(current_user)):
        return store.search_files(project_id, q)

    @app.get("/files/my")
    def my_files(user: str = Depends(current_user)):
        return store.my_files(user)

    @app.get("/files/recent")
    def recent_files(user: str = Depends(current_user)):
        return store.recent_files(user)

    @app.get("/files/{file_id}")
    def get_file(file_id: str, user: str = Depends(current_user)):
        record = store.get_file(file_id)
        store.record_view(user, file_id)
        return record

    @app.get("/files/{file_id}/pages")
    def get_pages(file_id: str, user: str = Depends(current_user)):
        return [page_payload(p) for p in store.pages(file_id)]

    @app.post("/files/{file_id}/lock")
    def acquire_lock(file_id: str, user: str = Depends(current_user)):
        return store.acquire_lock(file_id, user)

    @app.put("/files/{file_id}/lock")
    def renew_lock(file_id: str, user: str = Depends(current_user)):
        return store.renew_lock(file_id, user)

    @app.delete("/files/{file_id}/lock")
    def release_lock(file_id: str, user: str = Depends(current_user)):
        store.release_lock(file_id, user)
        return {"ok": True}

    @app.post("/files/{file_id}/take-charge")
    def take_charge(file_id: str, user: str = Depends(current_user)):
        return store.take_charge(file_id, user)

    @app.delete("/files/{file_id}/take-charge")
    def release_charge(file_id: str, user: str = Depends(current_user)):
        return store.release_charge(file_id, user)

    # --------------------------------------------------------------- meta

    @app.get("/files/{file_id}/meta")
    def get_meta(file_id: str, user: str = Depends(current_user)):
        return service.get_meta(file_id)

    @app.put("/files/{file_id}/meta")
    def put_meta(file_id: str, body: dict = Body(...),
                 user: str = Depends(current_user)):
        return service.save_meta(file_id, body, user).to_dict()

    # ------------------------------------------------------------- tables

    @app.get("/files/{file_id}/tables")
    def list_tables(file_id: str, user: str = Depends(current_user)):
        return [table_to_dict(a) for a in store.list_tables(file_id)]

    @app.post("/files/{file_id}/pages/{page_index}/tables/detect")
    def detect_tables(file_id: str, page_index: int,
                      user: str = Depends(current_user)):
        return service.detect_tables(file_id, page_index)

    @app.post("/tables/{table_id}/confirm-region")
    def confirm_table_region(table_id: str, body: dict = Body(...),
                             user: str = Depends(current_user)):
        return service.confirm_table_region(table_id, body["region"], user)

    @app.post("/tables/{table_id}/structure")
    def propose_structure(table_id: str, user: str = Depends(current_user)):
        return service.propose_table_structure(table_id, user)

    @app.put("/tables/{table_id}/structure")
    def edit_structure(table_id: str, body: dict = Body(...),
                       user: str = Depends(current_user)):
        return service.edit_table_structure(table_id, body, user)

    @app.post("/tables/{table_id}/confirm-structure")
    def confirm_structure(table_id: str, user: str = Depends(current_user)):
        return service.confirm_table_structure(table_id, user)

    @app.post("/tables/{table_id}/content")
    def propose_content(table_id: str, user: str = Depends(current_user)):
        return service.propose_table_content(table_id, user)

    @app.put("/tables/{table_id}/cells")
    def edit_cell(table_id: str, body: dict = Body(...),
                  user: str = Depends(current_user)):
        return service.edit_table_cell(table_id, int(body["row"]),
                                       int(body["col"]), body["text"], user)

    @app.post("/tables/{table_id}/confirm-content")
    def confirm_content(table_id: str, user: str = Depends(current_user)):
        return service.confirm_table_content(table_id, user)

    @app.post("/tables/{table_id}/revert")
    def revert_table(table_id: str, body: dict = Body(...),
                     user: str = Depends(current_user)):
        return service.revert_table(table_id, body["target"], user)

    @app.get("/tables/{table_id}/mapping")
    def get_mapping(table_id: str, user: str = Depends(current_user)):
        return mapping_to_dict(service.table_mapping(table_id))

    @app.put("/tables/{table_id}/mapping")
    def put_mapping(table_id: str, body: dict = Body(...),
                    user: str = Depends(current_user)):
        return mapping_to_dict(
            service.set_table_mapping(table_id, body.get("mapping", {}),
                                      user))

    # --------------------------------------------------------------- text

    @app.get("/files/{file_id}/sections")
    def get_sections(file_id: str, user: str = Depends(current_user)):
        return {"sections": store.sections(file_id)}

    @app.get("/files/{file_id}/spans")
    def list_spans(file_id: str, user: str = Depends(current_user)):
        return [span_to_dict(s) for s in store.list_spans(file_id)]

    @app.post("/files/{file_id}/re-annotate")
    def re_annotate(file_id: str, user: str = Depends(current_user)):
        return [span_to_dict(s) for s in service.annotate(file_id, user)]

    @app.post("/files/{file_id}/spans", status_code=201)
    def add_span(file_id: str, body: dict = Body(...),
                 user: str = Depends(current_user)):
        span = service.add_span(
            file_id, int(body["section_index"]), int(body["start"]),
            int(body["end"]), body["label"], user)
        return span_to_dict(span)

    @app.delete("/spans/{span_id}")
    def delete_span(span_id: str, user: str = Depends(current_user)):
        service.delete_span(span_id, user)
        return {"ok": True}

    @app.put("/spans/{span_id}/link")
    def link_span(span_id: str, body: dict = Body(...),
                  user: str = Depends(current_user)):
        return span_to_dict(
            service.link_span(span_id, body.get("field"), user))

    # --------------------------------------------------------------- maps

    @app.get("/files/{file_id}/maps")
    def list_maps(file_id: str, user: str = Depends(current_user)):
        return [map_to_dict(a) for a in store.list_maps(file_id)]

    @app.post("/files/{file_id}/pages/{page_index}/maps/detect")
    def detect_maps(file_id: str, page_index: int,
                    user: str = Depends(current_user)):
        return service.detect_maps(file_id, page_index)

    @app.post("/maps/{map_id}/confirm-region")
    def confirm_map_region(map_id: str, body: dict = Body(...),
                           user: str = Depends(current_user)):
        return service.confirm_map_region(map_id, body["region"], user)

    @app.post("/maps/{map_id}/gridlines")
    def propose_grid(map_id: str, user: str = Depends(current_user)):
        return service.propose_map_grid(map_id, user)

    @app.put("/maps/{map_id}/gridlines")
    def edit_gridline(map_id: str, body: dict = Body(...),
                      user: str = Depends(current_user)):
        return service.edit_map_gridline(map_id, body, user)

    @app.post("/maps/{map_id}/fit")
    def confirm_grid(map_id: str, user: str = Depends(current_user)):
        return service.confirm_map_grid(map_id, user)

    @app.post("/maps/{map_id}/start-marking")
    def start_marking(map_id: str, user: str = Depends(current_user)):
        return service.start_map_marking(map_id, user)

    @app.post("/maps/{map_id}/points", status_code=201)
    def mark_point(map_id: str, body: dict = Body(...),
                   user: str = Depends(current_user)):
        return service.mark_map_point(
            map_id, float(body["x"]), float(body["y"]),
            body.get("attached_key"), user)

    @app.post("/maps/{map_id}/revert")
    def revert_map(map_id: str, body: dict = Body(...),
                   user: str = Depends(current_user)):
        return service.revert_map(map_id, body["target"], user)

    # ---------------------------------------------------------- integrate

    @app.post("/files/{file_id}/integrate")
    def integrate_document(file_id: str, user: str = Depends(current_user)):
        return document_dataset_to_dict(
            service.integrate_document(file_id, user))

    @app.get("/files/{file_id}/export")
    def export_document(file_id: str, format: str = "csv",
                        user: str = Depends(current_user)):
        return Response(service.export_document(file_id, format),
                        media_type=_export_media(format))

    @app.post("/projects/{project_id}/integrate")
    def integrate_project(project_id: str,
                          user: str = Depends(current_user)):
        return project_dataset_to_dict(
            service.integrate_whole_project(project_id))

    @app.get("/projects/{project_id}/export")
    def export_project(project_id: str, format: str = "csv",
                       user: str = Depends(current_user)):
        return Response(service.export_project(project_id, format),
                        media_type=_export_media(format))

    # -------------------------------------------------------- corrections

    @app.get("/projects/{project_id}/corrections/export")
    def export_corrections(project_id: str,
                           user: str = Depends(current_user)):
        return Response(store.export_corrections(project_id),
                        media_type=NDJSON_MEDIA)

    return app


def app_from_config(config: AppConfig | None = None) -> FastAPI:
    config = config or load_config()
    store = Store(config.store_path,
                  lease_duration=config.lease_duration_s,
                  session_duration=config.session_duration_s)
    extras = build_adapters(config.adapters)
    service = Service(store, config, meta_adapters=extras["meta"],
                      detector=extras["detector"], ocr=extras["ocr"])
    return create_app(service)
