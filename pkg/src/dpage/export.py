"""Static webpage export: the target-path thread as one linear document.

The export is the non-interactive rendition of a page: every cell on the
root-to-target path in order, assessments rendered as static blocks with
their answers in a collapsed section, and the full code snapshot shown at
each cell that changes the code.  Branches off the target path are omitted.
Media assets are copied byte-exact into ``media/``.

Markdown is rendered by a deliberately small internal converter (headings,
fenced code, lists, paragraphs, inline code/emphasis/links); full CommonMark
fidelity is out of scope for the static baseline.
"""

from __future__ import annotations

import html
import re
from pathlib import Path

from . import directives, model
from .directives import CodeQuestionSpec, MultipleChoiceSpec
from .model import Page

_STYLE = """\
body { font-family: Georgia, serif; max-width: 46rem; margin: 2rem auto; padding: 0 1rem; line-height: 1.55; }
.cell { margin-bottom: 2rem; }
.speaker { font-weight: bold; color: #444; margin-bottom: .3rem; }
pre { background: #f4f4f4; padding: .8rem; overflow-x: auto; }
code { background: #f4f4f4; padding: 0 .2rem; }
.assessment { border: 1px solid #ccc; padding: .8rem 1rem; margin: 1rem 0; }
.assessment ul { list-style: none; padding-left: 0; }
details { margin-top: .6rem; }
summary { cursor: pointer; color: #666; }
.code-snapshot { border-left: 3px solid #88a; padding-left: 1rem; margin: 1rem 0; }
.code-snapshot h4 { margin: .2rem 0; font-family: monospace; }
"""


def export_static(page: Page, out_dir: str | Path) -> Path:
    """Write the static rendition into ``out_dir``; returns the index file."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "style.css").write_text(_STYLE, encoding="utf-8")
    if page.media:
        media_dir = out / "media"
        media_dir.mkdir(exist_ok=True)
        for name, data in page.media.items():
            (media_dir / Path(name).name).write_bytes(data)

    sections = []
    snapshots = model.all_snapshots(page)
    for cid in model.target_path(page):
        cell = page.cells[cid]
        persona = page.persona(cell.persona_id)
        speaker = html.escape(persona.name if persona else cell.persona_id)
        body = [f'<section class="cell" data-cell="{html.escape(cid)}">']
        body.append(f'<div class="speaker">{speaker}</div>')
        for segment in directives.render_segments(cell.source, cid):
            if segment.kind == "markdown":
                body.append(markdown_to_html(segment.text))
            else:
                body.append(_directive_html(segment.directive))
        if cell.code_diffs:
            body.append(_snapshot_html(snapshots[cid].files))
        body.append("</section>")
        sections.append("\n".join(body))

    document = (
        "<!DOCTYPE html>\n<html>\n<head>\n"
        '<meta charset="utf-8">\n'
        f"<title>{html.escape(page.title)}</title>\n"
        '<link rel="stylesheet" href="style.css">\n'
        "</head>\n<body>\n"
        f"<h1>{html.escape(page.title)}</h1>\n" + "\n".join(sections) + "\n</body>\n</html>\n"
    )
    index = out / "index.html"
    index.write_text(document, encoding="utf-8")
    return index


def _directive_html(directive: directives.Directive) -> str:
    spec = directive.spec
    if isinstance(spec, MultipleChoiceSpec):
        options = "\n".join(f"<li>&#9634; {_inline(opt.label)}</li>" for opt in spec.options)
        answer_bits = [f"Correct: {_inline(', '.join(o.label for o in spec.options if o.correct))}"]
        for opt in spec.options:
            if opt.feedback:
                answer_bits.append(f"{_inline(opt.label)} &mdash; {_inline(opt.feedback)}")
        answers = "<br>\n".join(answer_bits)
        return (
            f'<div class="assessment" data-directive="{html.escape(directive.id)}">\n'
            f"{markdown_to_html(spec.prompt)}\n<ul>\n{options}\n</ul>\n"
            f"<details><summary>Show answer</summary>\n<p>{answers}</p>\n</details>\n</div>"
        )
    if isinstance(spec, CodeQuestionSpec):
        parts = [
            f'<div class="assessment" data-directive="{html.escape(directive.id)}">',
            markdown_to_html(spec.prompt),
        ]
        if spec.starter:
            parts.append(f"<pre><code>{html.escape(spec.starter)}</code></pre>")
        hidden = []
        if spec.solution is not None:
            hidden.append(f"<pre><code>{html.escape(spec.solution)}</code></pre>")
        if spec.tests is not None:
            hidden.append(f"<p>Tests:</p><pre><code>{html.escape(spec.tests)}</code></pre>")
        if hidden:
            parts.append("<details><summary>Show answer</summary>\n" + "\n".join(hidden) + "\n</details>")
        parts.append("</div>")
        return "\n".join(parts)
    # unknown or malformed directive: show its raw body as preformatted text
    return f"<pre><code>{html.escape(directive.body)}</code></pre>"


def _snapshot_html(files: dict[str, str]) -> str:
    parts = ['<div class="code-snapshot">']
    for name in sorted(files):
        parts.append(f"<h4>{html.escape(name)}</h4>")
        parts.append(f"<pre><code>{html.escape(files[name])}</code></pre>")
    parts.append("</div>")
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# minimal markdown renderer

_INLINE_RULES = [
    (re.compile(r"`([^`]+)`"), r"<code>\1</code>"),
    (re.compile(r"\*\*([^*]+)\*\*"), r"<strong>\1</strong>"),
    (re.compile(r"\*([^*]+)\*"), r"<em>\1</em>"),
    (re.compile(r"!\[([^\]]*)\]\(([^)]+)\)"), r'<img alt="\1" src="\2">'),
    (re.compile(r"\[([^\]]+)\]\(([^)]+)\)"), r'<a href="\2">\1</a>'),
]


def _inline(text: str) -> str:
    out = html.escape(text, quote=False)
    for pattern, replacement in _INLINE_RULES:
        out = pattern.sub(replacement, out)
    return out


def markdown_to_html(text: str) -> str:
    """Small-footprint Markdown: headings, fences, lists, paragraphs."""
    lines = text.split("\n")
    out: list[str] = []
    paragraph: list[str] = []
    list_items: list[str] = []
    fence: list[str] | None = None

    def flush():
        nonlocal paragraph, list_items
        if paragraph:
            out.append(f"<p>{_inline(' '.join(paragraph))}</p>")
            paragraph = []
        if list_items:
            out.append("<ul>" + "".join(f"<li>{item}</li>" for item in list_items) + "</ul>")
            list_items = []

    for line in lines:
        if fence is not None:
            if line.strip().startswith("```"):
                out.append(f"<pre><code>{html.escape(chr(10).join(fence))}</code></pre>")
                fence = None
            else:
                fence.append(line)
            continue
        if line.strip().startswith("```"):
            flush()
            fence = []
            continue
        heading = re.match(r"^(#{1,6})\s+(.*)$", line)
        if heading:
            flush()
            level = len(heading.group(1))
            out.append(f"<h{level}>{_inline(heading.group(2))}</h{level}>")
            continue
        item = re.match(r"^\s*[-*]\s+(.*)$", line)
        if item:
            if paragraph:
                flush()
            list_items.append(_inline(item.group(1)))
            continue
        if not line.strip():
            flush()
            continue
        if list_items:
            flush()
        paragraph.append(line.strip())
    if fence is not None:
        out.append(f"<pre><code>{html.escape(chr(10).join(fence))}</code></pre>")
    flush()
    return "\n".join(out)
