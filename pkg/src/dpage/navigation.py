"""Reader-session semantics over the immutable page plus a per-reader overlay.

The page on disk is never touched by a reader.  Everything the reader does
lives in a UserState: the current cell, the visited set, directive answers,
and overlay cells (their own questions and the LLM's replies) grafted onto
the base tree.  The combined structure is still a tree, so the flattened
thread, divergence detection, and back-to-main-thread all stay well defined.

All operations are pure: they return a new UserState and never modify the
page or the state they were given.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import directives, model
from .assessments import AnswerRecord
from .errors import NavigationError, UnknownCellError
from .model import Cell, Page


@dataclass
class UserState:
    page_id: str
    page_content_hash: str
    current_cell_id: str
    visited: set[str] = field(default_factory=set)
    answers: dict[str, AnswerRecord] = field(default_factory=dict)
    overlay_cells: dict[str, Cell] = field(default_factory=dict)
    overlay_children: dict[str, list[str]] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "pageId": self.page_id,
            "pageContentHash": self.page_content_hash,
            "currentCellId": self.current_cell_id,
            "visited": sorted(self.visited),
            "answers": {did: rec.to_json_dict() for did, rec in sorted(self.answers.items())},
            "overlayCells": {cid: cell.to_json_dict() for cid, cell in sorted(self.overlay_cells.items())},
            "overlayChildren": {cid: list(kids) for cid, kids in sorted(self.overlay_children.items())},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> UserState:
        return cls(
            page_id=data["pageId"],
            page_content_hash=data["pageContentHash"],
            current_cell_id=data["currentCellId"],
            visited=set(data.get("visited", [])),
            answers={did: AnswerRecord.from_json_dict(rec) for did, rec in data.get("answers", {}).items()},
            overlay_cells={cid: Cell.from_json_dict(c) for cid, c in data.get("overlayCells", {}).items()},
            overlay_children={cid: list(kids) for cid, kids in data.get("overlayChildren", {}).items()},
        )


@dataclass
class CellView:
    cell_id: str
    persona_name: str
    rendered_segments: list[dict]
    has_multiple_responses: bool
    is_divergence_point: bool
    ai_warning: bool
    code_changed: bool

    def to_json_dict(self) -> dict:
        return {
            "cellId": self.cell_id,
            "personaName": self.persona_name,
            "renderedSegments": self.rendered_segments,
            "hasMultipleResponses": self.has_multiple_responses,
            "isDivergencePoint": self.is_divergence_point,
            "aiWarning": self.ai_warning,
            "codeChanged": self.code_changed,
        }


def new_state(page: Page) -> UserState:
    return UserState(
        page_id=page.id,
        page_content_hash=model.page_content_hash(page),
        current_cell_id=page.root_id,
        visited={page.root_id},
    )


# ---------------------------------------------------------------------------
# combined base + overlay tree


def resolve_cell(page: Page, state: UserState, cell_id: str) -> Cell:
    if cell_id in page.cells:
        return page.cells[cell_id]
    if cell_id in state.overlay_cells:
        return state.overlay_cells[cell_id]
    raise UnknownCellError(f"unknown cell id {cell_id!r}")


def combined_children(page: Page, state: UserState, cell_id: str) -> list[str]:
    """Base children in stored order, then overlay children."""
    base = list(page.cells[cell_id].child_ids) if cell_id in page.cells else []
    return base + list(state.overlay_children.get(cell_id, []))


def combined_ancestors(page: Page, state: UserState, cell_id: str) -> list[str]:
    resolve_cell(page, state, cell_id)
    parents = model.parent_map(page)
    for parent, kids in state.overlay_children.items():
        for kid in kids:
            parents[kid] = parent
    limit = len(page.cells) + len(state.overlay_cells)
    path = [cell_id]
    while path[-1] != page.root_id:
        parent = parents.get(path[-1])
        if parent is None or len(path) > limit:
            raise NavigationError(f"cell {cell_id!r} is not connected to the root")
        path.append(parent)
    path.reverse()
    return path


def with_overlay_cell(page: Page, state: UserState, parent_id: str, cell: Cell) -> UserState:
    """Graft one reader-created cell under ``parent_id`` (base or overlay)."""
    resolve_cell(page, state, parent_id)
    if cell.id in page.cells or cell.id in state.overlay_cells:
        raise ValueError(f"cell id {cell.id!r} already exists")
    if cell.child_ids or cell.code_diffs:
        raise ValueError("overlay cells carry no children or code diffs of their own")
    overlay_cells = dict(state.overlay_cells)
    overlay_cells[cell.id] = cell
    overlay_children = {cid: list(kids) for cid, kids in state.overlay_children.items()}
    overlay_children.setdefault(parent_id, []).append(cell.id)
    return replace(state, overlay_cells=overlay_cells, overlay_children=overlay_children)


# ---------------------------------------------------------------------------
# reader operations


def visible_thread(page: Page, state: UserState) -> list[CellView]:
    """The flattened thread: the current cell and all its ancestors, in order."""
    if state.page_id != page.id:
        raise NavigationError(f"state belongs to page {state.page_id!r}, not {page.id!r}")
    divergence = divergence_point(page, state)
    views = []
    for cid in combined_ancestors(page, state, state.current_cell_id):
        cell = resolve_cell(page, state, cid)
        persona = page.persona(cell.persona_id)
        views.append(
            CellView(
                cell_id=cid,
                persona_name=persona.name if persona else cell.persona_id,
                rendered_segments=[_segment_view(s) for s in directives.render_segments(cell.source, cid)],
                has_multiple_responses=len(combined_children(page, state, cid)) > 1,
                is_divergence_point=cid == divergence,
                ai_warning=cell.ai_generated and not cell.verified,
                code_changed=bool(cell.code_diffs),
            )
        )
    return views


def available_responses(page: Page, state: UserState) -> list[str]:
    return combined_children(page, state, state.current_cell_id)


def select_response(page: Page, state: UserState, cell_id: str) -> UserState:
    """Advance to one of the current cell's responses."""
    if cell_id not in available_responses(page, state):
        raise NavigationError(f"cell {cell_id!r} is not a response to {state.current_cell_id!r}")
    return replace(state, current_cell_id=cell_id, visited=state.visited | {cell_id})


def divergence_point(page: Page, state: UserState) -> str | None:
    """First cell on the reader's path that is not on the target path."""
    on_target = set(model.target_path(page))
    for cid in combined_ancestors(page, state, state.current_cell_id):
        if cid not in on_target:
            return cid
    return None


def back_to_main(page: Page, state: UserState) -> str | None:
    """The target-path cell to resume from after diverging; None when on it.

    This is the target-path node at the divergence depth; when the reader
    wandered deeper than the target itself, it clamps to the target.
    """
    divergence = divergence_point(page, state)
    if divergence is None:
        return None
    depth = combined_ancestors(page, state, state.current_cell_id).index(divergence)
    path = model.target_path(page)
    return path[min(depth, len(path) - 1)]


def jump_to(page: Page, state: UserState, cell_id: str) -> UserState:
    """Revisit a visited cell, an ancestor, or the back-to-main target."""
    resolve_cell(page, state, cell_id)
    allowed = set(state.visited)
    allowed.update(combined_ancestors(page, state, state.current_cell_id))
    main = back_to_main(page, state)
    if main is not None:
        allowed.add(main)
    if cell_id not in allowed:
        raise NavigationError(f"cell {cell_id!r} has not been visited and is not a sanctioned jump target")
    return replace(state, current_cell_id=cell_id, visited=state.visited | {cell_id})


def reached_target(page: Page, state: UserState) -> bool:
    return page.target_id in state.visited


def replace_current(state: UserState, cell_id: str, also_visit: set[str] | frozenset = frozenset()) -> UserState:
    """Move the cursor without legality checks; callers own the invariants."""
    return replace(state, current_cell_id=cell_id, visited=state.visited | {cell_id} | set(also_visit))


def with_answer(state: UserState, record: AnswerRecord) -> UserState:
    answers = dict(state.answers)
    answers[record.directive_id] = record
    return replace(state, answers=answers)


def reconcile(page: Page, state: UserState) -> UserState:
    """Adapt a stored state to a page that changed since it was saved.

    Directive ids are designed to survive wording edits, so answers keyed by
    ids that still exist are kept.  Overlay subtrees whose anchor vanished
    are dropped, and the current cell falls back to the root if it no longer
    resolves.
    """
    if state.page_id != page.id:
        raise NavigationError(f"state belongs to page {state.page_id!r}, not {page.id!r}")
    current_hash = model.page_content_hash(page)
    if state.page_content_hash == current_hash:
        return state

    live_ids = {d.id for cid, cell in page.cells.items() for d in directives.scan_directives(cid, cell.source)}
    answers = {did: rec for did, rec in state.answers.items() if did in live_ids}

    known = set(page.cells)
    overlay_children: dict[str, list[str]] = {}
    pending = {
        parent: [kid for kid in kids if kid in state.overlay_cells]
        for parent, kids in state.overlay_children.items()
    }
    changed = True
    while changed:
        changed = False
        for parent in list(pending):
            if parent in known:
                kids = pending.pop(parent)
                if kids:
                    overlay_children[parent] = kids
                known.update(kids)
                changed = True
    overlay_cells = {cid: cell for cid, cell in state.overlay_cells.items() if cid in known}

    current = state.current_cell_id if state.current_cell_id in known else page.root_id
    visited = (state.visited & known) | {current}
    return UserState(
        page_id=page.id,
        page_content_hash=current_hash,
        current_cell_id=current,
        visited=visited,
        answers=answers,
        overlay_cells=overlay_cells,
        overlay_children=overlay_children,
    )


def _segment_view(segment: directives.Segment) -> dict:
    """Reader-safe projection: never leaks correct flags or solutions."""
    if segment.kind == "markdown":
        return {"kind": "markdown", "text": segment.text}
    d = segment.directive
    view: dict = {"kind": "directive", "id": d.id, "dirType": d.dir_type}
    spec = d.spec
    if isinstance(spec, directives.MultipleChoiceSpec):
        view["prompt"] = spec.prompt
        view["options"] = [opt.label for opt in spec.options]
    elif isinstance(spec, directives.CodeQuestionSpec):
        view["prompt"] = spec.prompt
        view["language"] = spec.language
        view["starter"] = spec.starter
        view["hasSolution"] = spec.solution is not None
    return view
