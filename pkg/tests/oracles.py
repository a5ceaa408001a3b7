"""Independent re-implementations used to cross-check the engine.

Everything here is deliberately written from scratch (plain dict/list
splicing, recursive search) rather than calling into dpage internals, so a
bug in the engine cannot hide in its own oracle.
"""

from __future__ import annotations

import random
from functools import lru_cache

from dpage import model
from dpage.diffs import CodeSnapshot
from dpage.model import Cell, Page, Persona


def minimal_edit_count(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    """Minimal add+del count over all line alignments (prefix recursion)."""

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        best = min(go(i + 1, j) + 1, go(i, j + 1) + 1)
        if a[i] == b[j]:
            best = min(best, go(i + 1, j + 1))
        return best

    return go(0, 0)


def _olines(text: str) -> list[str]:
    if text == "":
        return []
    body = text[:-1] if text.endswith("\n") else text
    return body.split("\n")


def _ojoin(lines: list[str], eof: bool) -> str:
    if not lines:
        return ""
    return "\n".join(lines) + ("\n" if eof else "")


def oracle_apply(files: dict[str, str], diff) -> dict[str, str]:
    files = dict(files)
    if diff.deleted:
        assert diff.file in files
        files.pop(diff.file)
        return files
    base = _olines(files.get(diff.file, ""))
    out: list[str] = []
    pos = 0
    for ln in diff.lines:
        if ln.op == "add":
            out.append(ln.text)
        else:
            assert pos < len(base) and base[pos] == ln.text, f"context mismatch in {diff.file}"
            if ln.op == "keep":
                out.append(ln.text)
            pos += 1
    assert pos == len(base), f"diff for {diff.file} did not consume its base"
    files[diff.file] = _ojoin(out, diff.eof_newline)
    return files


def oracle_snapshots(page: Page) -> dict[str, dict[str, str]]:
    """Materialize every cell's full code state by walking the stored tree."""
    result: dict[str, dict[str, str]] = {}

    def walk(cell_id: str, files: dict[str, str]) -> None:
        for fd in page.cells[cell_id].code_diffs:
            files = oracle_apply(files, fd)
        result[cell_id] = files
        for child in page.cells[cell_id].child_ids:
            walk(child, files)

    walk(page.root_id, {})
    return result


def oracle_root_path(page: Page, cell_id: str) -> list[str]:
    """Exhaustive DFS over child edges for the unique root-to-cell path."""
    found: list[list[str]] = []

    def walk(cid: str, path: list[str]) -> None:
        path = path + [cid]
        if cid == cell_id:
            found.append(path)
        for child in page.cells[cid].child_ids:
            walk(child, path)

    walk(page.root_id, [])
    assert len(found) == 1, f"expected exactly one path to {cell_id}, found {len(found)}"
    return found[0]


# ---------------------------------------------------------------------------
# randomized pages and author-edit sequences

FILE_POOL = ["main.py", "util.py", "notes.txt"]
LINE_POOL = ["a", "b", "c", "x = 1", "", "print(x)", "b"]


def random_snapshot(rng: random.Random) -> CodeSnapshot:
    files = {}
    for name in FILE_POOL:
        if rng.random() < 0.6:
            lines = [rng.choice(LINE_POOL) for _ in range(rng.randint(0, 6))]
            files[name] = _ojoin(lines, rng.random() < 0.8)
    return CodeSnapshot(files)


def random_page(rng: random.Random, max_cells: int = 30) -> tuple[Page, dict[str, dict[str, str]]]:
    """Grow a random valid page through the engine's own authoring ops.

    Returns the page plus the expected snapshot of every cell, maintained
    purely from the documented semantics of each operation.
    """
    page = Page(
        version=model.PAGE_VERSION,
        id="00000000-0000-0000-0000-000000000000",
        title="random page",
        personas=[
            Persona(id="i", name="Inst", description="instructor", kind="instructor"),
            Persona(id="r", name="Reader", description="reader", kind="reader"),
        ],
        cells={"root": Cell(id="root", persona_id="i", source="root")},
        root_id="root",
        target_id="root",
    )
    expected: dict[str, dict[str, str]] = {"root": {}}
    for _ in range(rng.randint(1, max_cells - 1)):
        parent = rng.choice(list(page.cells))
        page, new_id = model.add_cell(page, parent, rng.choice(["i", "r"]), f"cell under {parent}")
        expected[new_id] = dict(expected[parent])
        if rng.random() < 0.5:
            desired = random_snapshot(rng)
            page = model.set_code(page, new_id, desired)
            expected[new_id] = dict(desired.files)
    # retarget somewhere real so delete_cell has a protected target
    target = rng.choice(list(page.cells))
    page = Page(**{**page.__dict__, "target_id": target})
    return page, expected


def random_edit(rng: random.Random, page: Page, expected: dict[str, dict[str, str]]):
    """Apply one random author edit; keep ``expected`` in sync by op semantics."""
    op = rng.choice(["add", "edit", "move", "delete", "set_code"])
    ids = list(page.cells)
    if op == "add":
        parent = rng.choice(ids)
        page, new_id = model.add_cell(page, parent, "i", "added")
        expected[new_id] = dict(expected[parent])
    elif op == "edit":
        page = model.edit_cell_source(page, rng.choice(ids), "edited source")
    elif op == "move":
        cell_id = rng.choice(ids)
        blocked = model.subtree_ids(page, cell_id)
        candidates = [c for c in ids if c not in blocked]
        if cell_id != page.root_id and candidates:
            parent = rng.choice(candidates)
            page = model.move_cell(page, cell_id, parent, rng.randint(0, 3))
    elif op == "delete":
        candidates = [c for c in ids if c not in (page.root_id, page.target_id)]
        if candidates:
            victim = rng.choice(candidates)
            page = model.delete_cell(page, victim)
            expected.pop(victim)
    else:
        cell_id = rng.choice(ids)
        desired = random_snapshot(rng)
        page = model.set_code(page, cell_id, desired)
        expected[cell_id] = dict(desired.files)
    return page, expected
