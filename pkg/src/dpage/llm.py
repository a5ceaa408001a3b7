"""Chat-endpoint integration: context assembly, reader asks, author drafts.

When a reader asks their own question, the whole visible thread (the current
cell and its ancestors) becomes the conversation context, so the model sees
exactly what the reader sees -- no unexplored branches leak in.  Replies are
grafted onto the reader's overlay as instructor-voiced cells flagged
``ai_generated`` and unverified, which the UI must render with a warning.

Role mapping: instructor personas speak as ``assistant``, the reader as
``user``, and any other persona as ``user`` with a ``Name:`` prefix.
Directive blocks are stripped from context (replaced by a placeholder) so
quizzes cannot leak their own answers into a reply.
"""

from __future__ import annotations

import copy
import os
import uuid
from dataclasses import dataclass

import requests

from . import navigation
from .directives import strip_directives
from .errors import LlmError, UnknownCellError
from .model import INSTRUCTOR, READER, Cell, Page, Persona
from .navigation import UserState

DEFAULT_MODEL = "gpt-3.5-turbo"


@dataclass
class ChatTurn:
    role: str  # system | assistant | user
    content: str
    persona_id: str | None = None

    def to_message(self) -> dict:
        return {"role": self.role, "content": self.content}


@dataclass
class LlmConfig:
    endpoint_url: str
    model_id: str = DEFAULT_MODEL
    api_key_env_var: str = ""
    max_tokens: int = 512
    temperature: float = 0.7
    enabled: bool = True
    timeout_s: float = 60.0

    @classmethod
    def from_json_dict(cls, data: dict) -> LlmConfig:
        return cls(
            endpoint_url=data.get("endpointUrl", ""),
            model_id=data.get("modelId", DEFAULT_MODEL),
            api_key_env_var=data.get("apiKeyEnvVar", ""),
            max_tokens=int(data.get("maxTokens", 512)),
            temperature=float(data.get("temperature", 0.7)),
            enabled=bool(data.get("enabled", True)),
            timeout_s=float(data.get("timeoutS", 60.0)),
        )


def assemble_context(page: Page, state: UserState, question: str) -> list[ChatTurn]:
    """System prompt, one turn per visible cell, then the reader's question."""
    if not question.strip():
        raise ValueError("question must not be empty")
    instructor = page.personas_of_kind(INSTRUCTOR)[0]
    turns = [
        ChatTurn(
            role="system",
            content=(
                f"{instructor.description}\n"
                f"Answer as this instructor, concisely, in the context of this tutorial: {page.title}"
            ),
        )
    ]
    for cid in navigation.combined_ancestors(page, state, state.current_cell_id):
        cell = navigation.resolve_cell(page, state, cid)
        persona = page.persona(cell.persona_id)
        content = strip_directives(cell.source)
        if persona is not None and persona.kind == INSTRUCTOR:
            role = "assistant"
        elif persona is not None and persona.kind == READER:
            role = "user"
        else:
            role = "user"
            name = persona.name if persona else cell.persona_id
            content = f"{name}: {content}"
        turns.append(ChatTurn(role=role, content=content, persona_id=cell.persona_id))
    turns.append(ChatTurn(role="user", content=question))
    return turns


def chat_request(config: LlmConfig, turns: list[ChatTurn]) -> str:
    """One whole-response chat-completion request; no streaming."""
    if not config.endpoint_url:
        raise LlmError("no chat endpoint configured", retryable=False)
    if not config.api_key_env_var:
        raise LlmError("no API-key environment variable configured", retryable=False)
    headers = {"Content-Type": "application/json"}
    if config.api_key_env_var:
        key = os.environ.get(config.api_key_env_var)
        if key:
            headers["Authorization"] = f"Bearer {key}"
    payload = {
        "model": config.model_id,
        "messages": [t.to_message() for t in turns],
        "max_tokens": config.max_tokens,
        "temperature": config.temperature,
    }
    try:
        response = requests.post(config.endpoint_url, json=payload, headers=headers, timeout=config.timeout_s)
    except requests.RequestException as err:
        raise LlmError(f"chat endpoint unreachable: {err}") from err
    if response.status_code // 100 != 2:
        raise LlmError(f"chat endpoint returned HTTP {response.status_code}: {response.text[:200]}")
    try:
        return response.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as err:
        raise LlmError(f"malformed chat response: {err}", retryable=False) from err


def ask(page: Page, state: UserState, question: str, config: LlmConfig) -> tuple[UserState, list[str]]:
    """Ask the model a custom question from the current position.

    On success the overlay gains a reader question cell and an
    instructor-voiced, unverified response cell, and the reader moves onto
    the response.  On any failure the given state is returned untouched
    (nothing is mutated before the endpoint replies).
    """
    if not config.enabled:
        raise LlmError("LLM queries are disabled in this configuration", retryable=False)
    turns = assemble_context(page, state, question)
    reply = chat_request(config, turns)

    reader = page.personas_of_kind(READER)[0]
    instructor = page.personas_of_kind(INSTRUCTOR)[0]
    question_cell = Cell(
        id=_fresh_overlay_id(page, state),
        persona_id=reader.id,
        source=question,
        ai_generated=False,
        verified=True,
    )
    updated = navigation.with_overlay_cell(page, state, state.current_cell_id, question_cell)
    response_cell = Cell(
        id=_fresh_overlay_id(page, updated),
        persona_id=instructor.id,
        source=reply,
        ai_generated=True,
        verified=False,
    )
    updated = navigation.with_overlay_cell(page, updated, question_cell.id, response_cell)
    updated = navigation.replace_current(updated, response_cell.id, also_visit={question_cell.id})
    return updated, [question_cell.id, response_cell.id]


def generate_dialog(personas: list[Persona], topic: str, turn_count: int, config: LlmConfig) -> list[Cell]:
    """Draft a linear dialog alternating personas, all flagged unverified.

    The chain is returned as draft cells (each linked to the next); authors
    graft it into a page and must verify cells before they can sit on a
    target path without lint warnings.
    """
    if len(personas) < 2:
        raise ValueError("dialog generation needs at least two personas")
    if turn_count < 1:
        raise ValueError("turn_count must be at least 1")
    if not config.enabled:
        raise LlmError("LLM queries are disabled in this configuration", retryable=False)

    roster = "\n".join(f"- {p.name}: {p.description}" for p in personas)
    system = ChatTurn(
        role="system",
        content=(
            f"You are drafting an educational dialog about: {topic}\n"
            f"Participants:\n{roster}\n"
            "Reply with only the next message's text, with no name prefix."
        ),
    )
    cells: list[Cell] = []
    history: list[ChatTurn] = []
    for i in range(turn_count):
        speaker = personas[i % len(personas)]
        prompt = ChatTurn(role="user", content=f"Write the next message, spoken by {speaker.name}.")
        reply = chat_request(config, [system, *history, prompt])
        history.append(ChatTurn(role="assistant", content=f"{speaker.name}: {reply}"))
        cells.append(
            Cell(
                id=f"draft-{uuid.uuid4().hex[:8]}",
                persona_id=speaker.id,
                source=reply,
                ai_generated=True,
                verified=False,
            )
        )
    for cell, successor in zip(cells, cells[1:]):
        cell.child_ids = [successor.id]
    return cells


def graft_dialog(page: Page, parent_id: str, drafts: list[Cell]) -> Page:
    """Attach a generated chain under an existing cell of the page."""
    if parent_id not in page.cells:
        raise UnknownCellError(f"unknown cell id {parent_id!r}")
    for cell in drafts:
        if cell.id in page.cells:
            raise ValueError(f"draft cell id {cell.id!r} already exists in the page")
    updated = copy.deepcopy(page)
    for cell in drafts:
        updated.cells[cell.id] = copy.deepcopy(cell)
    updated.cells[parent_id].child_ids.append(drafts[0].id)
    return updated


def verify_cell(page: Page, cell_id: str) -> Page:
    """Author attestation that an AI-generated cell's content is accurate."""
    if cell_id not in page.cells:
        raise UnknownCellError(f"unknown cell id {cell_id!r} (overlay cells cannot be verified)")
    updated = copy.deepcopy(page)
    updated.cells[cell_id].verified = True
    return updated


def _fresh_overlay_id(page: Page, state: UserState) -> str:
    while True:
        cid = f"ov-{uuid.uuid4().hex[:8]}"
        if cid not in page.cells and cid not in state.overlay_cells:
            return cid
