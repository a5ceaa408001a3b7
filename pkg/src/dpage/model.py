"""Page data model: dialog-tree documents, canonical JSON io, and edits.

A page is an immutable authored artifact: a persona list, a single rooted
tree of dialog cells, a designated target cell whose reaching completes the
page's learning goals, and embedded media.  Every cell stores its Markdown
source plus the code diffs that evolve the page's code samples along the
root-to-cell path.

All mutating operations return a new Page; values are never edited in place.
Structural edits (move/delete/set_code) preserve every surviving cell's
reconstructed code snapshot byte-for-byte by re-deriving stored diffs from
captured snapshots.
"""

from __future__ import annotations

import base64
import binascii
import copy
import hashlib
import json
import uuid
from dataclasses import dataclass, field

from . import directives
from .diffs import CodeSnapshot, FileDiff, apply_diff, compute_diff
from .errors import CycleError, PageFormatError, PageValidationError, UnknownCellError

PAGE_VERSION = 1

INSTRUCTOR = "instructor"
READER = "reader"
OTHER = "other"

_PERSONA_KINDS = (INSTRUCTOR, READER, OTHER)


@dataclass
class Persona:
    id: str
    name: str
    description: str
    kind: str
    extra: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {**self.extra, "id": self.id, "name": self.name, "description": self.description, "kind": self.kind}

    @classmethod
    def from_json_dict(cls, data: dict) -> Persona:
        known = {"id", "name", "description", "kind"}
        p = cls(
            id=_expect_str(data, "id", "persona"),
            name=_expect_str(data, "name", "persona"),
            description=_expect_str(data, "description", "persona"),
            kind=_expect_str(data, "kind", "persona"),
            extra={k: v for k, v in data.items() if k not in known},
        )
        if p.kind not in _PERSONA_KINDS:
            raise PageFormatError(f"persona {p.id!r} has unknown kind {p.kind!r}")
        return p


@dataclass
class DeicticPointer:
    file: str
    start_line: int  # 1-based, inclusive
    end_line: int
    extra: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {**self.extra, "file": self.file, "startLine": self.start_line, "endLine": self.end_line}

    @classmethod
    def from_json_dict(cls, data: dict) -> DeicticPointer:
        known = {"file", "startLine", "endLine"}
        return cls(
            file=_expect_str(data, "file", "pointer"),
            start_line=_expect_int(data, "startLine", "pointer"),
            end_line=_expect_int(data, "endLine", "pointer"),
            extra={k: v for k, v in data.items() if k not in known},
        )


@dataclass
class Cell:
    id: str
    persona_id: str
    source: str
    child_ids: list[str] = field(default_factory=list)
    code_diffs: list[FileDiff] = field(default_factory=list)
    pointers: list[DeicticPointer] = field(default_factory=list)
    ai_generated: bool = False
    verified: bool = True
    extra: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            **self.extra,
            "id": self.id,
            "personaId": self.persona_id,
            "source": self.source,
            "childIds": list(self.child_ids),
            "codeDiffs": [fd.to_json_dict() for fd in self.code_diffs],
            "pointers": [p.to_json_dict() for p in self.pointers],
            "aiGenerated": self.ai_generated,
            "verified": self.verified,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> Cell:
        known = {"id", "personaId", "source", "childIds", "codeDiffs", "pointers", "aiGenerated", "verified"}
        try:
            return cls(
                id=_expect_str(data, "id", "cell"),
                persona_id=_expect_str(data, "personaId", "cell"),
                source=_expect_str(data, "source", "cell"),
                child_ids=[_expect_plain_str(c, "childIds") for c in data.get("childIds", [])],
                code_diffs=[FileDiff.from_json_dict(fd) for fd in data.get("codeDiffs", [])],
                pointers=[DeicticPointer.from_json_dict(p) for p in data.get("pointers", [])],
                ai_generated=bool(data.get("aiGenerated", False)),
                verified=bool(data.get("verified", True)),
                extra={k: v for k, v in data.items() if k not in known},
            )
        except (KeyError, TypeError) as err:
            raise PageFormatError(f"malformed cell entry: {err}") from err


@dataclass
class Page:
    version: int
    id: str
    title: str
    personas: list[Persona]
    cells: dict[str, Cell]
    root_id: str
    target_id: str
    media: dict[str, bytes] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def persona(self, persona_id: str) -> Persona | None:
        for p in self.personas:
            if p.id == persona_id:
                return p
        return None

    def personas_of_kind(self, kind: str) -> list[Persona]:
        return [p for p in self.personas if p.kind == kind]


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def summary(self) -> str:
        lines = [f"error: {e}" for e in self.errors] + [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) if lines else "ok"


def _expect_str(data: dict, key: str, where: str) -> str:
    value = data.get(key)
    if not isinstance(value, str):
        raise PageFormatError(f"{where} field {key!r} must be a string, got {type(value).__name__}")
    return value


def _expect_plain_str(value, where: str) -> str:
    if not isinstance(value, str):
        raise PageFormatError(f"{where} entries must be strings, got {type(value).__name__}")
    return value


def _expect_int(data: dict, key: str, where: str) -> int:
    value = data.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise PageFormatError(f"{where} field {key!r} must be an integer")
    return value


def load_page(data: bytes) -> Page:
    """Parse and validate a page document.

    Raises PageFormatError on malformed documents and PageValidationError
    (carrying the full report) when structural invariants are violated.
    """
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise PageFormatError(f"not a valid page document: {err}") from err
    if not isinstance(doc, dict):
        raise PageFormatError("page document must be a JSON object")
    version = doc.get("version")
    if version != PAGE_VERSION:
        raise PageFormatError(f"unsupported page version {version!r} (expected {PAGE_VERSION})")

    personas_raw = doc.get("personas")
    cells_raw = doc.get("cells")
    media_raw = doc.get("media", {})
    if not isinstance(personas_raw, list) or not isinstance(cells_raw, dict) or not isinstance(media_raw, dict):
        raise PageFormatError("page document has malformed personas/cells/media fields")

    cells: dict[str, Cell] = {}
    for key, raw in cells_raw.items():
        if not isinstance(raw, dict):
            raise PageFormatError(f"cell entry {key!r} must be an object")
        cell = Cell.from_json_dict(raw)
        if cell.id != key:
            raise PageFormatError(f"cell key {key!r} does not match its id {cell.id!r}")
        cells[key] = cell

    media: dict[str, bytes] = {}
    for name, encoded in media_raw.items():
        if not isinstance(encoded, str):
            raise PageFormatError(f"media entry {name!r} must be a base64 string")
        try:
            media[name] = base64.b64decode(encoded, validate=True)
        except binascii.Error as err:
            raise PageFormatError(f"media entry {name!r} is not valid base64: {err}") from err

    known = {"version", "id", "title", "personas", "cells", "rootId", "targetId", "media"}
    page = Page(
        version=version,
        id=_expect_str(doc, "id", "page"),
        title=_expect_str(doc, "title", "page"),
        personas=[Persona.from_json_dict(p) for p in personas_raw],
        cells=cells,
        root_id=_expect_str(doc, "rootId", "page"),
        target_id=_expect_str(doc, "targetId", "page"),
        media=media,
        extra={k: v for k, v in doc.items() if k not in known},
    )
    report = validate(page)
    if report.errors:
        raise PageValidationError(report)
    return page


def save_page(page: Page) -> bytes:
    """Serialize a page to its canonical byte form.

    Deterministic: UTF-8, sorted object keys, two-space indent, base64
    media.  load_page(save_page(p)) is structurally equal to p.
    """
    doc = {
        **page.extra,
        "version": page.version,
        "id": page.id,
        "title": page.title,
        "personas": [p.to_json_dict() for p in page.personas],
        "cells": {cid: cell.to_json_dict() for cid, cell in page.cells.items()},
        "rootId": page.root_id,
        "targetId": page.target_id,
        "media": {name: base64.b64encode(data).decode("ascii") for name, data in page.media.items()},
    }
    return (json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n").encode("utf-8")


def page_content_hash(page: Page) -> str:
    return hashlib.sha256(save_page(page)).hexdigest()


def new_page(title: str, instructor_name: str = "Instructor", instructor_description: str = "") -> Page:
    """Smallest useful page: one instructor/reader persona pair, one cell."""
    root = Cell(id="root", persona_id="instructor", source=f"Welcome to *{title}*.")
    return Page(
        version=PAGE_VERSION,
        id=str(uuid.uuid4()),
        title=title,
        personas=[
            Persona(
                id="instructor",
                name=instructor_name,
                description=instructor_description or f"A knowledgeable instructor teaching {title}.",
                kind=INSTRUCTOR,
            ),
            Persona(id="reader", name="You", description="The reader working through this page.", kind=READER),
        ],
        cells={"root": root},
        root_id="root",
        target_id="root",
    )


# ---------------------------------------------------------------------------
# tree queries


def parent_map(page: Page) -> dict[str, str]:
    """child id -> parent id over the stored tree (root has no entry)."""
    parents: dict[str, str] = {}
    for cid, cell in page.cells.items():
        for child in cell.child_ids:
            parents[child] = cid
    return parents


def ancestors(page: Page, cell_id: str) -> list[str]:
    """Unique root-to-cell path, root first, ``cell_id`` last."""
    if cell_id not in page.cells:
        raise UnknownCellError(f"unknown cell id {cell_id!r}")
    parents = parent_map(page)
    path = [cell_id]
    while path[-1] != page.root_id:
        parent = parents.get(path[-1])
        if parent is None or len(path) > len(page.cells):
            raise PageFormatError(f"cell {cell_id!r} is not connected to the root")
        path.append(parent)
    path.reverse()
    return path


def target_path(page: Page) -> list[str]:
    return ancestors(page, page.target_id)


def subtree_ids(page: Page, cell_id: str) -> set[str]:
    if cell_id not in page.cells:
        raise UnknownCellError(f"unknown cell id {cell_id!r}")
    seen: set[str] = set()
    stack = [cell_id]
    while stack:
        cid = stack.pop()
        if cid in seen:
            continue
        seen.add(cid)
        stack.extend(ch for ch in page.cells[cid].child_ids if ch in page.cells)
    return seen


# ---------------------------------------------------------------------------
# code snapshots


def snapshot_at(page: Page, cell_id: str) -> CodeSnapshot:
    """Full code state at a cell: ancestor diffs folded from an empty state."""
    snap = CodeSnapshot()
    for cid in ancestors(page, cell_id):
        snap = apply_diff(snap, page.cells[cid].code_diffs)
    return snap


def all_snapshots(page: Page) -> dict[str, CodeSnapshot]:
    """Snapshot of every cell, computed in one top-down pass."""
    snaps: dict[str, CodeSnapshot] = {}
    stack = [(page.root_id, CodeSnapshot())]
    while stack:
        cid, base = stack.pop()
        snap = apply_diff(base, page.cells[cid].code_diffs)
        snaps[cid] = snap
        for child in page.cells[cid].child_ids:
            if child in page.cells and child not in snaps:
                stack.append((child, snap))
    return snaps


# ---------------------------------------------------------------------------
# validation


def validate(page: Page) -> ValidationReport:
    """Check every structural invariant; findings land in the report.

    Errors are invariant violations (the page is unusable); warnings flag
    authoring problems such as unverified content on the target path or
    deictic pointers that fell out of range.
    """
    report = ValidationReport()
    errors, warnings = report.errors, report.warnings

    persona_ids: set[str] = set()
    for p in page.personas:
        if p.id in persona_ids:
            errors.append(f'duplicate persona id "{p.id}"')
        persona_ids.add(p.id)
    readers = page.personas_of_kind(READER)
    if len(readers) != 1:
        errors.append(f"page must have exactly one reader persona, found {len(readers)}")
    if not page.personas_of_kind(INSTRUCTOR):
        errors.append("page must have at least one instructor persona")

    parents: dict[str, str] = {}
    for cid, cell in page.cells.items():
        if cell.persona_id not in persona_ids:
            errors.append(f'cell "{cid}" references unknown persona "{cell.persona_id}"')
        if not cell.ai_generated and not cell.verified:
            errors.append(f'human-authored cell "{cid}" must be verified')
        seen_children: set[str] = set()
        for child in cell.child_ids:
            if child not in page.cells:
                errors.append(f'cell "{cid}" references missing child "{child}"')
                continue
            if child in seen_children:
                errors.append(f'cell "{cid}" lists child "{child}" twice')
                continue
            seen_children.add(child)
            if child in parents:
                errors.append(f'cell "{child}" has multiple parents ("{parents[child]}" and "{cid}")')
            else:
                parents[child] = cid

    if page.root_id not in page.cells:
        errors.append(f'root cell "{page.root_id}" does not exist')
    if page.target_id not in page.cells:
        errors.append(f'target cell "{page.target_id}" does not exist')

    if page.root_id in page.cells:
        if page.root_id in parents:
            errors.append(f'root cell "{page.root_id}" has parent "{parents[page.root_id]}"')
        reachable = subtree_ids(page, page.root_id)
        if page.target_id in page.cells and page.target_id not in reachable:
            errors.append(f'target cell "{page.target_id}" is unreachable from the root')
        for cid in sorted(set(page.cells) - reachable - {page.target_id}):
            errors.append(f'cell "{cid}" is unreachable from the root')

    if errors:
        return report

    directive_owner: dict[str, str] = {}
    for cid, cell in page.cells.items():
        for d in directives.scan_directives(cid, cell.source):
            if d.id in directive_owner:
                errors.append(f'directive id "{d.id}" collides between cells "{directive_owner[d.id]}" and "{cid}"')
            else:
                directive_owner[d.id] = cid

    try:
        snaps = all_snapshots(page)
    except Exception as err:  # corrupt diff chains surface here
        errors.append(f"corrupt code diffs: {err}")
        return report

    for cid, cell in page.cells.items():
        snap = snaps[cid]
        for ptr in cell.pointers:
            if ptr.start_line < 1 or ptr.end_line < ptr.start_line:
                errors.append(f'cell "{cid}" pointer has invalid range {ptr.start_line}-{ptr.end_line}')
            elif ptr.file not in snap:
                warnings.append(f'cell "{cid}" pointer targets missing file "{ptr.file}"')
            elif ptr.end_line > snap.line_count(ptr.file):
                warnings.append(
                    f'cell "{cid}" pointer to "{ptr.file}" lines {ptr.start_line}-{ptr.end_line} '
                    f"is out of range ({snap.line_count(ptr.file)} lines)"
                )

    for cid in target_path(page):
        cell = page.cells[cid]
        if cell.ai_generated and not cell.verified:
            warnings.append(f'unverified content on target path: cell "{cid}"')

    return report


# ---------------------------------------------------------------------------
# authoring mutations (each returns a new Page)


def add_cell(page: Page, parent_id: str, persona_id: str, source: str, ai_generated: bool = False) -> tuple[Page, str]:
    """Append a new child cell under ``parent_id``; returns (page, new id)."""
    if parent_id not in page.cells:
        raise UnknownCellError(f"unknown cell id {parent_id!r}")
    if page.persona(persona_id) is None:
        raise ValueError(f"unknown persona id {persona_id!r}")
    new_id = _fresh_cell_id(page)
    updated = copy.deepcopy(page)
    updated.cells[new_id] = Cell(
        id=new_id,
        persona_id=persona_id,
        source=source,
        ai_generated=ai_generated,
        verified=not ai_generated,
    )
    updated.cells[parent_id].child_ids.append(new_id)
    return updated, new_id


def edit_cell_source(page: Page, cell_id: str, source: str) -> Page:
    if cell_id not in page.cells:
        raise UnknownCellError(f"unknown cell id {cell_id!r}")
    updated = copy.deepcopy(page)
    updated.cells[cell_id].source = source
    return updated


def move_cell(page: Page, cell_id: str, new_parent_id: str, index: int) -> Page:
    """Re-attach a subtree under a new parent, keeping all snapshots intact."""
    if cell_id not in page.cells:
        raise UnknownCellError(f"unknown cell id {cell_id!r}")
    if new_parent_id not in page.cells:
        raise UnknownCellError(f"unknown cell id {new_parent_id!r}")
    if new_parent_id in subtree_ids(page, cell_id):
        raise CycleError(f'moving "{cell_id}" under "{new_parent_id}" would create a cycle')
    preserved = all_snapshots(page)
    updated = copy.deepcopy(page)
    old_parent = parent_map(updated)[cell_id]
    updated.cells[old_parent].child_ids.remove(cell_id)
    siblings = updated.cells[new_parent_id].child_ids
    siblings.insert(max(0, min(index, len(siblings))), cell_id)
    return _rederive(updated, preserved)


def delete_cell(page: Page, cell_id: str) -> Page:
    """Remove one cell, re-parenting its children into its place."""
    if cell_id not in page.cells:
        raise UnknownCellError(f"unknown cell id {cell_id!r}")
    if cell_id == page.root_id:
        raise ValueError("the root cell cannot be deleted")
    if cell_id == page.target_id:
        raise ValueError("the target cell cannot be deleted")
    preserved = all_snapshots(page)
    del preserved[cell_id]
    updated = copy.deepcopy(page)
    parent_id = parent_map(updated)[cell_id]
    children = updated.cells[cell_id].child_ids
    siblings = updated.cells[parent_id].child_ids
    position = siblings.index(cell_id)
    updated.cells[parent_id].child_ids = siblings[:position] + children + siblings[position + 1 :]
    del updated.cells[cell_id]
    return _rederive(updated, preserved)


def set_code(page: Page, cell_id: str, desired: CodeSnapshot) -> Page:
    """Set one cell's code state; every other cell's snapshot is unchanged."""
    if cell_id not in page.cells:
        raise UnknownCellError(f"unknown cell id {cell_id!r}")
    preserved = all_snapshots(page)
    preserved[cell_id] = desired.copy()
    return _rederive(copy.deepcopy(page), preserved)


def rederive_all(page: Page, preserved: dict[str, CodeSnapshot]) -> Page:
    """Rewrite every cell's stored diffs so snapshots match ``preserved``."""
    return _rederive(copy.deepcopy(page), preserved)


def _rederive(page: Page, preserved: dict[str, CodeSnapshot]) -> Page:
    missing = set(page.cells) - set(preserved)
    if missing:
        raise ValueError(f"preserved snapshots missing for cells: {sorted(missing)}")
    parents = parent_map(page)
    empty = CodeSnapshot()
    for cid, cell in page.cells.items():
        base = preserved[parents[cid]] if cid in parents else empty
        cell.code_diffs = compute_diff(base, preserved[cid])
    return page


def _fresh_cell_id(page: Page) -> str:
    while True:
        cid = uuid.uuid4().hex[:8]
        if cid not in page.cells:
            return cid
