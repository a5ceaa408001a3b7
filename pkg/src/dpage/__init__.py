"""dpage: goal-aligned dialogic tutorial pages.

Authoring, validation, and serving of ``.dpage`` documents: dialog trees
with a target learning cell, incrementally built code samples stored as
line diffs, interactive assessments embedded as Markdown directives, and
context-constrained LLM branching kept in per-reader overlay state.
"""

from .diffs import CodeSnapshot, DiffLine, FileDiff, apply_diff, compute_diff
from .directives import render_segments, scan_directives
from .model import (
    Cell,
    DeicticPointer,
    Page,
    Persona,
    ValidationReport,
    add_cell,
    ancestors,
    delete_cell,
    edit_cell_source,
    load_page,
    move_cell,
    new_page,
    page_content_hash,
    save_page,
    set_code,
    snapshot_at,
    target_path,
    validate,
)
from .navigation import (
    UserState,
    available_responses,
    back_to_main,
    divergence_point,
    jump_to,
    new_state,
    reached_target,
    select_response,
    visible_thread,
)

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "CodeSnapshot",
    "DeicticPointer",
    "DiffLine",
    "FileDiff",
    "Page",
    "Persona",
    "UserState",
    "ValidationReport",
    "add_cell",
    "ancestors",
    "apply_diff",
    "available_responses",
    "back_to_main",
    "compute_diff",
    "delete_cell",
    "divergence_point",
    "edit_cell_source",
    "jump_to",
    "load_page",
    "move_cell",
    "new_page",
    "new_state",
    "page_content_hash",
    "reached_target",
    "render_segments",
    "save_page",
    "scan_directives",
    "select_response",
    "set_code",
    "snapshot_at",
    "target_path",
    "validate",
    "visible_thread",
]
