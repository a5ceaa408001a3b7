from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from dpage import model
from dpage.cli import main
from dpage.demo import demo_page
from dpage.model import load_page, save_page


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def demo_file(tmp_path):
    path = tmp_path / "demo.dpage"
    path.write_bytes(save_page(demo_page()))
    return path


@pytest.fixture
def broken_file(tmp_path):
    page = demo_page()
    page.cells["2a"].child_ids.append("9z")
    doc = json.loads(save_page(page).decode())
    path = tmp_path / "broken.dpage"
    path.write_text(json.dumps(doc))
    return path


def test_validate_ok_exit_zero(runner, demo_file):
    result = runner.invoke(main, ["validate", "--page", str(demo_file)])
    assert result.exit_code == 0
    assert "ok" in result.output


def test_validate_broken_exit_nonzero_with_report(runner, broken_file):
    result = runner.invoke(main, ["validate", "--page", str(broken_file)])
    assert result.exit_code != 0
    assert '"2a"' in result.output and '"9z"' in result.output


def test_validate_missing_file(runner, tmp_path):
    result = runner.invoke(main, ["validate", "--page", str(tmp_path / "nope.dpage")])
    assert result.exit_code != 0


def test_new_creates_validating_page(runner, tmp_path):
    out = tmp_path / "fresh.dpage"
    result = runner.invoke(main, ["new", "Intro to Loops", "--out", str(out)])
    assert result.exit_code == 0, result.output
    page = load_page(out.read_bytes())
    assert page.title == "Intro to Loops"
    assert model.validate(page).ok


def test_gen_previews_without_confirm(runner, demo_file):
    before = demo_file.read_bytes()
    result = runner.invoke(
        main,
        ["gen", "--page", str(demo_file), "--topic", "dict comprehensions", "--turns", "3", "--mock-llm"],
    )
    assert result.exit_code == 0, result.output
    assert "--confirm" in result.output
    assert demo_file.read_bytes() == before


def test_gen_confirm_writes_unverified_drafts(runner, demo_file):
    before = load_page(demo_file.read_bytes())
    result = runner.invoke(
        main,
        [
            "gen",
            "--page",
            str(demo_file),
            "--topic",
            "dict comprehensions",
            "--turns",
            "3",
            "--mock-llm",
            "--confirm",
        ],
    )
    assert result.exit_code == 0, result.output
    after = load_page(demo_file.read_bytes())
    assert len(after.cells) == len(before.cells) + 3
    drafts = [c for cid, c in after.cells.items() if cid not in before.cells]
    assert all(c.ai_generated and not c.verified for c in drafts)
    assert model.validate(after).ok


def test_export_writes_directory(runner, demo_file, tmp_path):
    out = tmp_path / "site"
    result = runner.invoke(main, ["export", "--page", str(demo_file), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert (out / "index.html").exists()
    assert (out / "media" / "logo.png").read_bytes() == demo_page().media["logo.png"]


def test_serve_refuses_invalid_page(runner, broken_file):
    result = runner.invoke(main, ["serve", "--page", str(broken_file), "--port", "0"])
    assert result.exit_code != 0
    assert "9z" in result.output


def test_sample_page_matches_builder():
    from pathlib import Path

    sample = Path(__file__).resolve().parent.parent / "samples" / "demo.dpage"
    assert sample.exists(), "samples/demo.dpage should be committed"
    assert sample.read_bytes() == save_page(demo_page())
