"""HTTP facade over the idea graph, agents, and persistence.

Handlers are synchronous on purpose: the framework runs them on a thread
pool, per-project locks serialize mutations, and the slow provider calls
deliberately run outside the project lock so one long chat never blocks
requests for other projects. Every error response is ``{"code", "message"}``
with a code from the documented closed set.
"""
from __future__ import annotations

from typing import Iterable, Optional

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import graph
from .agents import AgentRoles, generate_meta_reflection, refine_meta_reflection, section_chat
from .errors import InvalidKindError, MeflexError, ProviderError
from .model import ExtensionKind, Section
from .provider import Provider
from .store import ProjectRegistry, export_markdown


class PositionBody(BaseModel):
    x: float = 0.0
    y: float = 0.0

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


class CreateProjectBody(BaseModel):
    title: str
    topic: str = ""


class CreateNodeBody(BaseModel):
    kind: str
    parent_id: Optional[str] = None
    position: PositionBody = PositionBody()


class SectionPatchBody(BaseModel):
    content: Optional[str] = None
    done: Optional[bool] = None


class NodePatchBody(BaseModel):
    position: PositionBody


class ChatBody(BaseModel):
    message: str


def create_app(
    *,
    registry: ProjectRegistry,
    roles: AgentRoles,
    provider: Provider,
    topics: Optional[list[str]] = None,
    cors_origins: Iterable[str] = (),
    auto_meta_reflection: bool = False,
) -> FastAPI:
    app = FastAPI(title="meflex", docs_url=None, redoc_url=None)

    origins = list(cors_origins)
    if origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    # -- error envelope -----------------------------------------------------

    @app.exception_handler(MeflexError)
    def on_domain_error(request: Request, exc: MeflexError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.http_status,
            content={"code": exc.code, "message": str(exc)},
        )

    @app.exception_handler(RequestValidationError)
    def on_validation_error(
        request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"code": "validation_error", "message": str(exc.errors()[:3])},
        )

    @app.exception_handler(StarletteHTTPException)
    def on_http_error(
        request: Request, exc: StarletteHTTPException
    ) -> JSONResponse:
        code = {404: "not_found", 405: "method_not_allowed"}.get(
            exc.status_code, "http_error"
        )
        return JSONResponse(
            status_code=exc.status_code,
            content={"code": code, "message": str(exc.detail)},
        )

    # -- projects -----------------------------------------------------------

    @app.post("/projects", status_code=201)
    def create_project(body: CreateProjectBody) -> dict:
        project = registry.create(body.title, body.topic)
        return project.to_dict()

    @app.get("/projects")
    def list_projects() -> list[dict]:
        return [registry.project_summary(p) for p in registry.list_projects()]

    @app.get("/projects/{pid}")
    def get_project(pid: str) -> dict:
        project = registry.get(pid)
        with registry.lock(pid):
            return project.to_dict()

    @app.get("/topics")
    def list_topics() -> dict:
        return {"topics": list(topics or [])}

    # -- nodes ---------------------------------------------------------------

    @app.post("/projects/{pid}/nodes", status_code=201)
    def create_node(pid: str, body: CreateNodeBody) -> dict:
        project = registry.get(pid)
        kind = ExtensionKind.from_tag(body.kind)
        with registry.lock(pid):
            if kind is ExtensionKind.ROOT:
                if body.parent_id is not None:
                    raise InvalidKindError("a root node cannot have a parent")
                node = graph.create_root_node(project, body.position.as_tuple())
            else:
                if body.parent_id is None:
                    raise InvalidKindError(
                        f"kind '{kind.value}' requires parent_id"
                    )
                node = graph.extend_node(
                    project, body.parent_id, kind, body.position.as_tuple()
                )
            payload = node.to_dict()
        registry.mark_dirty(pid)
        if auto_meta_reflection and kind is not ExtensionKind.ROOT:
            try:
                generate_meta_reflection(
                    project, node.id, provider, roles,
                    state_lock=registry.lock(pid),
                )
                registry.mark_dirty(pid)
                with registry.lock(pid):
                    payload = graph.get_node(project, node.id).to_dict()
            except ProviderError:
                pass  # summary stays absent; the client can request it later
        return payload

    @app.get("/projects/{pid}/nodes/{nid}")
    def get_node(pid: str, nid: str) -> dict:
        project = registry.get(pid)
        with registry.lock(pid):
            return graph.get_node(project, nid).to_dict()

    @app.patch("/projects/{pid}/nodes/{nid}")
    def patch_node(pid: str, nid: str, body: NodePatchBody) -> dict:
        project = registry.get(pid)
        with registry.lock(pid):
            node = graph.move_node(project, nid, body.position.as_tuple())
            payload = node.to_dict()
        registry.mark_dirty(pid)
        return payload

    @app.delete("/projects/{pid}/nodes/{nid}", status_code=204)
    def delete_node(pid: str, nid: str) -> Response:
        project = registry.get(pid)
        with registry.lock(pid):
            graph.delete_node(project, nid)
        registry.mark_dirty(pid)
        return Response(status_code=204)

    @app.patch("/projects/{pid}/nodes/{nid}/sections/{section}")
    def patch_section(pid: str, nid: str, section: str, body: SectionPatchBody) -> dict:
        project = registry.get(pid)
        sec = Section.from_tag(section)
        if body.content is None and body.done is None:
            raise RequestValidationError(
                [{"msg": "provide 'content' and/or 'done'", "loc": ("body",)}]
            )
        with registry.lock(pid):
            if body.content is not None:
                draft = graph.edit_section(project, nid, sec, body.content)
            if body.done is not None:
                draft = graph.set_section_done(project, nid, sec, body.done)
            payload = {"node_id": nid, "section": sec.tag, **draft.to_dict()}
        registry.mark_dirty(pid)
        return payload

    # -- graph queries --------------------------------------------------------

    @app.get("/projects/{pid}/nodes/{nid}/lineage")
    def get_lineage(pid: str, nid: str) -> dict:
        project = registry.get(pid)
        with registry.lock(pid):
            return {"lineage": graph.get_lineage(project, nid)}

    @app.get("/projects/{pid}/diff")
    def get_diff(
        pid: str,
        from_id: str = Query(alias="from"),
        to_id: str = Query(alias="to"),
    ) -> dict:
        project = registry.get(pid)
        with registry.lock(pid):
            return graph.diff_nodes(project, from_id, to_id).to_dict()

    @app.get("/projects/{pid}/nodes/{nid}/todo")
    def get_todo(pid: str, nid: str) -> dict:
        project = registry.get(pid)
        with registry.lock(pid):
            node = graph.get_node(project, nid)
            return {"node_id": nid, **graph.completion_summary(node).to_dict()}

    @app.get("/projects/{pid}/nodes/{nid}/children")
    def get_children(pid: str, nid: str) -> dict:
        project = registry.get(pid)
        with registry.lock(pid):
            buckets = graph.list_children(project, nid)
        return {kind.value: ids for kind, ids in buckets.items()}

    @app.get("/projects/{pid}/nodes/{nid}/export")
    def get_export(pid: str, nid: str) -> dict:
        project = registry.get(pid)
        with registry.lock(pid):
            return {"node_id": nid, "markdown": export_markdown(project, nid)}

    # -- agent chat ------------------------------------------------------------

    @app.post("/projects/{pid}/nodes/{nid}/sections/{section}/chat")
    def post_chat(pid: str, nid: str, section: str, body: ChatBody) -> dict:
        project = registry.get(pid)
        sec = Section.from_tag(section)
        with registry.chat_lock(pid, nid):
            assistant, reflection = section_chat(
                project,
                nid,
                sec,
                body.message,
                provider,
                roles,
                state_lock=registry.lock(pid),
            )
        registry.mark_dirty(pid)
        return {
            "node_id": nid,
            "section": sec.tag,
            "assistant": assistant.to_dict(),
            "reflection": reflection.to_dict(),
        }

    @app.post("/projects/{pid}/nodes/{nid}/meta-reflection")
    def post_meta_reflection(pid: str, nid: str) -> dict:
        project = registry.get(pid)
        with registry.chat_lock(pid, nid):
            text = generate_meta_reflection(
                project, nid, provider, roles, state_lock=registry.lock(pid)
            )
        registry.mark_dirty(pid)
        return {"node_id": nid, "meta_reflection": text}

    @app.post("/projects/{pid}/nodes/{nid}/meta-reflection/chat")
    def post_meta_chat(pid: str, nid: str, body: ChatBody) -> dict:
        project = registry.get(pid)
        with registry.chat_lock(pid, nid):
            text = refine_meta_reflection(
                project, nid, body.message, provider, roles,
                state_lock=registry.lock(pid),
            )
        registry.mark_dirty(pid)
        with registry.lock(pid):
            thread = [m.to_dict() for m in graph.get_node(project, nid).meta_thread]
        return {"node_id": nid, "meta_reflection": text, "meta_thread": thread}

    return app
