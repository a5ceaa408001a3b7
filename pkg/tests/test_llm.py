from __future__ import annotations

import pytest

from dpage import model, navigation
from dpage.demo import demo_page
from dpage.errors import LlmError, UnknownCellError
from dpage.llm import (
    LlmConfig,
    ask,
    assemble_context,
    chat_request,
    generate_dialog,
    graft_dialog,
    verify_cell,
)
from dpage.mockllm import MockChatEndpoint
from dpage.model import Persona, save_page, validate
from dpage.navigation import new_state, select_response, visible_thread


@pytest.fixture
def endpoint():
    with MockChatEndpoint() as ep:
        yield ep


def config_for(endpoint: MockChatEndpoint, **overrides) -> LlmConfig:
    defaults = dict(endpoint_url=endpoint.url, api_key_env_var="DPAGE_TEST_API_KEY", timeout_s=5.0)
    defaults.update(overrides)
    return LlmConfig(**defaults)


def state_at_4b(page):
    state = new_state(page)
    for cid in ["2a", "3a", "4b"]:
        state = select_response(page, state, cid)
    return state


def test_context_is_system_plus_ancestors_plus_question():
    page = demo_page()
    state = state_at_4b(page)
    turns = assemble_context(page, state, "what is url")
    assert len(turns) == 4 + 2
    assert [t.role for t in turns] == ["system", "assistant", "user", "assistant", "user", "user"]
    assert page.personas[0].description in turns[0].content
    assert page.title in turns[0].content
    assert turns[-1].content == "what is url"


def test_context_strips_directive_markup():
    page = demo_page()
    turns = assemble_context(page, new_state(page), "hi")
    root_turn = turns[1]
    assert "::option" not in root_turn.content
    assert ":::" not in root_turn.content
    assert "multiple-choice" in root_turn.content  # placeholder names the type


def test_context_ignores_unexplored_branches():
    page = demo_page()
    state = state_at_4b(page)
    turns = assemble_context(page, state, "why?")
    texts = " ".join(t.content for t in turns)
    assert "roll_many" not in texts  # 3b is a sibling branch, not an ancestor


def test_other_personas_become_named_user_turns():
    page = demo_page()
    page.personas.append(Persona(id="ta", name="Sam", description="a teaching assistant", kind="other"))
    page.cells["2a"].persona_id = "ta"
    state = new_state(page)
    state = select_response(page, state, "2a")
    turns = assemble_context(page, state, "q")
    ta_turn = turns[2]
    assert ta_turn.role == "user"
    assert ta_turn.content.startswith("Sam: ")


def test_empty_question_rejected_before_assembly():
    page = demo_page()
    with pytest.raises(ValueError):
        assemble_context(page, new_state(page), "   ")


def test_ask_appends_flagged_overlay_branch(endpoint, monkeypatch):
    monkeypatch.setenv("DPAGE_TEST_API_KEY", "dummy-key")
    page = demo_page()
    state = state_at_4b(page)
    endpoint.replies = ["A module is a file of Python code."]

    updated, new_ids = ask(page, state, "what is a module?", config_for(endpoint))
    assert len(new_ids) == 2
    question, answer = (updated.overlay_cells[cid] for cid in new_ids)
    assert question.ai_generated is False and question.verified is True
    assert answer.ai_generated is True and answer.verified is False
    assert answer.source == "A module is a file of Python code."
    assert updated.current_cell_id == new_ids[1]

    views = visible_thread(page, updated)
    assert views[-1].ai_warning is True
    assert [v.cell_id for v in views][:4] == ["1a", "2a", "3a", "4b"]

    sent = endpoint.requests[-1]
    assert sent["model"] == "gpt-3.5-turbo"
    assert [m["role"] for m in sent["messages"]] == ["system", "assistant", "user", "assistant", "user", "user"]


def test_two_asks_chain_four_overlay_cells(endpoint):
    page = demo_page()
    state = state_at_4b(page)
    state, first = ask(page, state, "first question?", config_for(endpoint))
    state, second = ask(page, state, "second question?", config_for(endpoint))
    assert len(state.overlay_cells) == 4
    thread = [v.cell_id for v in visible_thread(page, state)]
    assert thread[-4:] == first + second


def test_ask_failure_leaves_state_unchanged(endpoint):
    page = demo_page()
    state = state_at_4b(page)
    before = state.to_json_dict()
    endpoint.fail_status = 500
    with pytest.raises(LlmError) as exc:
        ask(page, state, "doomed question", config_for(endpoint))
    assert exc.value.retryable is True
    assert state.to_json_dict() == before


def test_ask_disabled_config(endpoint):
    page = demo_page()
    state = new_state(page)
    with pytest.raises(LlmError):
        ask(page, state, "q", config_for(endpoint, enabled=False))


def test_ask_never_touches_the_page(endpoint):
    page = demo_page()
    before = save_page(page)
    state, _ = ask(page, state_at_4b(page), "q", config_for(endpoint))
    assert save_page(page) == before


def test_malformed_endpoint_response(monkeypatch, endpoint):
    import requests as requests_lib

    class FakeResponse:
        status_code = 200
        text = "{}"

        def json(self):
            return {"unexpected": True}

    monkeypatch.setattr(requests_lib, "post", lambda *a, **k: FakeResponse())
    with pytest.raises(LlmError) as exc:
        chat_request(config_for(endpoint), [])
    assert exc.value.retryable is False


def test_generate_dialog_scripted_chain(endpoint):
    endpoint.replies = ["Welcome to loops!", "What is a loop?", "A loop repeats work.", "Can I try one?"]
    page = demo_page()
    drafts = generate_dialog(page.personas, "for loops in Python", 4, config_for(endpoint))
    assert len(drafts) == 4
    assert [c.persona_id for c in drafts] == ["inst", "reader", "inst", "reader"]
    assert all(c.ai_generated and not c.verified for c in drafts)
    assert [c.source for c in drafts] == endpoint.replies
    for cell, successor in zip(drafts, drafts[1:]):
        assert cell.child_ids == [successor.id]
    assert drafts[-1].child_ids == []


def test_generate_dialog_preconditions(endpoint):
    page = demo_page()
    with pytest.raises(ValueError):
        generate_dialog(page.personas, "t", 0, config_for(endpoint))
    with pytest.raises(ValueError):
        generate_dialog(page.personas[:1], "t", 3, config_for(endpoint))


def test_graft_dialog_produces_valid_page_with_warnings(endpoint):
    endpoint.replies = ["a", "b"]
    page = demo_page()
    drafts = generate_dialog(page.personas, "topic", 2, config_for(endpoint))
    grafted = graft_dialog(page, "5d", drafts)
    report = validate(grafted)
    assert report.errors == []
    assert model.target_path(grafted) == model.target_path(page)


def test_verify_cell_clears_target_path_warning():
    page = demo_page()
    page.cells["3b"].ai_generated = True
    page.cells["3b"].verified = False
    assert any("unverified" in w for w in validate(page).warnings)
    verified = verify_cell(page, "3b")
    assert validate(verified).warnings == []
    assert page.cells["3b"].verified is False  # original untouched
    twice = verify_cell(verified, "3b")
    assert twice.cells["3b"] == verified.cells["3b"]


def test_verify_unknown_or_overlay_id():
    page = demo_page()
    with pytest.raises(UnknownCellError):
        verify_cell(page, "ov-123")
