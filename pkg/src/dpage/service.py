"""HTTP service exposing reader-session operations over one served page.

Every state-mutating endpoint is a thin 1:1 wrapper over a navigation,
assessment, or LLM operation; the service adds session bookkeeping and
persistence, never semantics.  The page is shared read-only across sessions
and the page file on disk is never written while serving.

Session states persist through the state store keyed by page id (the
single-user default) or by session id (``multi_user=True``).
"""

from __future__ import annotations

import datetime
import json
import mimetypes
import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import Response
from fastapi.staticfiles import StaticFiles

from . import assessments, llm, model, navigation, statestore
from .assessments import RunnerConfig
from .directives import CodeQuestionSpec, MultipleChoiceSpec, scan_directives
from .errors import (
    DpageError,
    LlmError,
    NavigationError,
    RunnerDisabledError,
    RunnerLaunchError,
    StateCorruptError,
    UnknownCellError,
    UnsupportedLanguageError,
)
from .llm import LlmConfig
from .model import Page
from .navigation import UserState


@dataclass
class _Session:
    handle: dict
    state: UserState
    lock: threading.Lock = field(default_factory=threading.Lock)
    ask_in_flight: bool = False


@dataclass
class AppConfig:
    llm: LlmConfig | None = None
    runners: RunnerConfig = field(default_factory=RunnerConfig)


def load_config_file(path: str | Path) -> AppConfig:
    """Service configuration: {"llm": {...}, "runners": {lang: {...}}}."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    llm_config = LlmConfig.from_json_dict(data["llm"]) if "llm" in data else None
    runners = RunnerConfig.from_json_dict(data.get("runners", {}))
    return AppConfig(llm=llm_config, runners=runners)


def create_app(
    page: Page,
    state_dir: str | Path | None = None,
    llm_config: LlmConfig | None = None,
    runner_config: RunnerConfig | None = None,
    multi_user: bool = False,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    report = model.validate(page)
    if report.errors:
        raise ValueError(f"refusing to serve an invalid page:\n{report.summary()}")

    app = FastAPI(title=f"dpage: {page.title}")
    sessions: dict[str, _Session] = {}
    runners = runner_config or RunnerConfig()

    def persist(session: _Session) -> None:
        if state_dir is None:
            return
        key = session.handle["sessionId"] if multi_user else None
        statestore.save_state(session.state, state_dir, key=key)

    def get_session(session_id: str) -> _Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    def nav_view(state: UserState) -> dict:
        return {
            "currentCellId": state.current_cell_id,
            "divergencePoint": navigation.divergence_point(page, state),
            "backToMain": navigation.back_to_main(page, state),
            "reachedTarget": navigation.reached_target(page, state),
        }

    def find_directive(session: _Session, directive_id: str):
        owner_id = directive_id.rsplit(":", 2)[0]
        try:
            cell = navigation.resolve_cell(page, session.state, owner_id)
        except UnknownCellError:
            raise HTTPException(status_code=404, detail=f"unknown directive {directive_id!r}")
        for directive in scan_directives(owner_id, cell.source):
            if directive.id == directive_id:
                if directive.spec is None:
                    raise HTTPException(status_code=409, detail=f"directive {directive_id!r} is malformed")
                return directive
        raise HTTPException(status_code=404, detail=f"unknown directive {directive_id!r}")

    def record_for(session: _Session, directive_id: str) -> assessments.AnswerRecord:
        return session.state.answers.get(directive_id) or assessments.AnswerRecord(directive_id)

    @app.post("/sessions")
    def create_session(body: dict = Body(...)):
        page_id = body.get("pageId")
        if page_id != page.id:
            raise HTTPException(status_code=404, detail=f"this service hosts page {page.id!r}, not {page_id!r}")
        session_id = secrets.token_urlsafe(16)
        state: UserState | None = None
        if state_dir is not None and not multi_user:
            try:
                state = statestore.load_state(page.id, state_dir)
            except StateCorruptError:
                state = None  # the corrupt file was preserved; start fresh
        if state is not None:
            state = navigation.reconcile(page, state)
        else:
            state = navigation.new_state(page)
        handle = {
            "sessionId": session_id,
            "pageId": page.id,
            "createdAt": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        }
        session = _Session(handle=handle, state=state)
        sessions[session_id] = session
        persist(session)
        return handle

    @app.get("/sessions/{session_id}/thread")
    def thread(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return [view.to_json_dict() for view in navigation.visible_thread(page, session.state)]

    @app.get("/sessions/{session_id}/nav")
    def nav(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return nav_view(session.state)

    @app.get("/sessions/{session_id}/responses")
    def responses(session_id: str):
        session = get_session(session_id)
        with session.lock:
            out = []
            for cid in navigation.available_responses(page, session.state):
                cell = navigation.resolve_cell(page, session.state, cid)
                persona = page.persona(cell.persona_id)
                preview = cell.source.strip().split("\n")[0]
                out.append(
                    {
                        "cellId": cid,
                        "personaName": persona.name if persona else cell.persona_id,
                        "preview": preview[:120],
                    }
                )
            return out

    @app.post("/sessions/{session_id}/select")
    def select(session_id: str, body: dict = Body(...)):
        session = get_session(session_id)
        with session.lock:
            session.state = navigation.select_response(page, session.state, body.get("cellId", ""))
            persist(session)
            return nav_view(session.state)

    @app.post("/sessions/{session_id}/jump")
    def jump(session_id: str, body: dict = Body(...)):
        session = get_session(session_id)
        with session.lock:
            session.state = navigation.jump_to(page, session.state, body.get("cellId", ""))
            persist(session)
            return nav_view(session.state)

    @app.post("/sessions/{session_id}/ask")
    def ask(session_id: str, body: dict = Body(...)):
        if llm_config is None:
            raise HTTPException(status_code=409, detail="no LLM endpoint configured")
        question = (body.get("question") or "").strip()
        if not question:
            raise HTTPException(status_code=400, detail="question must not be empty")
        session = get_session(session_id)
        with session.lock:
            if session.ask_in_flight:
                raise HTTPException(status_code=409, detail="another ask is already in flight for this session")
            session.ask_in_flight = True
            state_before = session.state
        try:
            # the request runs outside the lock: navigation stays responsive
            new_state, new_ids = llm.ask(page, state_before, question, llm_config)
        except LlmError as err:
            raise HTTPException(status_code=502, detail={"message": str(err), "retryable": err.retryable})
        finally:
            with session.lock:
                session.ask_in_flight = False
        with session.lock:
            if session.state is state_before:
                session.state = new_state
            else:
                # the reader navigated while the model was thinking: graft the
                # new branch where the question was asked, keep their cursor
                current = session.state
                question_cell, answer_cell = (new_state.overlay_cells[cid] for cid in new_ids)
                current = navigation.with_overlay_cell(page, current, state_before.current_cell_id, question_cell)
                current = navigation.with_overlay_cell(page, current, question_cell.id, answer_cell)
                session.state = navigation.replace_current(
                    current, current.current_cell_id, also_visit=set(new_ids)
                )
            persist(session)
            return {"newCellIds": new_ids, **nav_view(session.state)}

    @app.get("/sessions/{session_id}/code/{cell_id}")
    def code(session_id: str, cell_id: str):
        session = get_session(session_id)
        with session.lock:
            cell = navigation.resolve_cell(page, session.state, cell_id)
            if cell_id in page.cells:
                snapshot = model.snapshot_at(page, cell_id)
            else:
                # overlay cells carry no diffs: show their base anchor's code
                chain = navigation.combined_ancestors(page, session.state, cell_id)
                anchor = next(cid for cid in reversed(chain) if cid in page.cells)
                snapshot = model.snapshot_at(page, anchor)
            return {
                "files": snapshot.files,
                "diffs": [fd.to_json_dict() for fd in cell.code_diffs],
                "pointers": [p.to_json_dict() for p in cell.pointers],
            }

    @app.post("/sessions/{session_id}/answers/{directive_id}")
    def answer(session_id: str, directive_id: str, body: dict = Body(...)):
        session = get_session(session_id)
        with session.lock:
            directive = find_directive(session, directive_id)
            record = record_for(session, directive_id)
            action = body.get("action")
            if action == "skip":
                record = assessments.skip(record)
                result_payload: dict = {}
            elif action == "reveal":
                try:
                    solution = assessments.reveal_answer(directive.spec)
                except ValueError as err:
                    raise HTTPException(status_code=409, detail=str(err))
                record = assessments.mark_revealed(record)
                result_payload = {"solution": solution}
            elif "selected" in body:
                if not isinstance(directive.spec, MultipleChoiceSpec):
                    raise HTTPException(status_code=400, detail="selections only apply to multiple-choice")
                selected = body["selected"]
                record = assessments.record_attempt(record, list(selected))
                try:
                    graded = assessments.answer_multiple_choice(directive.spec, set(selected))
                except ValueError as err:
                    raise HTTPException(status_code=400, detail=str(err))
                record = assessments.apply_grade(record, graded.correct)
                result_payload = {"correct": graded.correct, "feedback": graded.feedback}
            else:
                raise HTTPException(status_code=400, detail="payload must carry 'selected' or an 'action'")
            session.state = navigation.with_answer(session.state, record)
            persist(session)
            return {**result_payload, "status": record.status, "attempts": record.attempts}

    @app.post("/sessions/{session_id}/run/{directive_id}")
    def run(session_id: str, directive_id: str, body: dict = Body(...)):
        session = get_session(session_id)
        code_text = body.get("code", "")
        with session.lock:
            directive = find_directive(session, directive_id)
            if not isinstance(directive.spec, CodeQuestionSpec):
                raise HTTPException(status_code=400, detail="run only applies to code questions")
            # a submission counts as an attempt even if the runner refuses it
            record = assessments.record_attempt(record_for(session, directive_id), code_text)
            session.state = navigation.with_answer(session.state, record)
            persist(session)
        try:
            result = assessments.submit_code_answer(directive.spec, code_text, runners)
        except (RunnerDisabledError, UnsupportedLanguageError) as err:
            raise HTTPException(status_code=409, detail=str(err))
        except RunnerLaunchError as err:
            raise HTTPException(status_code=500, detail=str(err))
        with session.lock:
            record = session.state.answers[directive_id]
            if result.tests_passed is not None:
                record = assessments.apply_grade(record, result.tests_passed)
            session.state = navigation.with_answer(session.state, record)
            persist(session)
            return {**result.to_json_dict(), "status": record.status, "attempts": record.attempts}

    @app.get("/pages/{page_id}/media/{filename}")
    def media(page_id: str, filename: str):
        if page_id != page.id or filename not in page.media:
            raise HTTPException(status_code=404, detail="no such media asset")
        media_type = mimetypes.guess_type(filename)[0] or "application/octet-stream"
        return Response(content=page.media[filename], media_type=media_type)

    @app.get("/page/meta")
    def page_meta():
        return {"pageId": page.id, "title": page.title, "contentHash": model.page_content_hash(page)}

    @app.exception_handler(UnknownCellError)
    def _unknown_cell(request, exc):
        return _error_response(404, str(exc))

    @app.exception_handler(NavigationError)
    def _navigation_error(request, exc):
        return _error_response(409, str(exc))

    @app.exception_handler(DpageError)
    def _engine_error(request, exc):
        return _error_response(400, str(exc))

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _error_response(status: int, detail: str):
    return Response(
        content=json.dumps({"detail": detail}),
        status_code=status,
        media_type="application/json",
    )
