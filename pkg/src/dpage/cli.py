"""The ``dpage`` command line: validate, new, gen, serve, export."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import llm as llm_mod
from . import model
from .demo import demo_page
from .errors import DpageError, PageFormatError, PageValidationError
from .export import export_static
from .service import AppConfig, create_app, load_config_file


def _load_page_or_exit(path: str) -> model.Page:
    try:
        return model.load_page(Path(path).read_bytes())
    except FileNotFoundError:
        click.echo(f"error: no such file: {path}", err=True)
        sys.exit(1)
    except PageValidationError as err:
        click.echo(f"{path} is not a valid page:", err=True)
        click.echo(err.report.summary(), err=True)
        sys.exit(1)
    except PageFormatError as err:
        click.echo(f"{path} is not a page document: {err}", err=True)
        sys.exit(1)


def _load_config(path: str | None) -> AppConfig:
    if path is None:
        return AppConfig()
    try:
        return load_config_file(path)
    except (OSError, ValueError, KeyError) as err:
        click.echo(f"error: could not read config {path}: {err}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Author and serve dialog-tree tutorial pages (.dpage files)."""


@main.command()
@click.option("--page", "page_path", required=True, type=click.Path(), help="Page file to check.")
def validate(page_path):
    """Validate a page; exit 0 only when it has no errors."""
    try:
        raw = Path(page_path).read_bytes()
    except OSError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    try:
        page = model.load_page(raw)
    except PageValidationError as err:
        click.echo(err.report.summary())
        sys.exit(1)
    except PageFormatError as err:
        click.echo(f"error: {err}")
        sys.exit(1)
    report = model.validate(page)
    click.echo(report.summary())
    sys.exit(0)


@main.command()
@click.argument("title")
@click.option("--out", "-o", "out_path", type=click.Path(), help="Destination file (default: <title>.dpage).")
@click.option("--demo", is_flag=True, help="Write the built-in demo page instead of a skeleton.")
def new(title, out_path, demo):
    """Create a skeleton page that validates out of the box."""
    page = demo_page() if demo else model.new_page(title)
    if demo:
        page.title = title
    destination = Path(out_path or f"{title.lower().replace(' ', '-')}.dpage")
    destination.write_bytes(model.save_page(page))
    click.echo(f"wrote {destination}")


@main.command()
@click.option("--page", "page_path", required=True, type=click.Path())
@click.option("--topic", required=True, help="What the generated dialog should teach.")
@click.option("--turns", default=4, show_default=True, help="Number of draft messages.")
@click.option("--parent", "parent_id", default=None, help="Cell to graft under (default: the target cell).")
@click.option("--config", "config_path", type=click.Path(), help="Service config with the LLM endpoint.")
@click.option("--mock-llm", is_flag=True, help="Use a local deterministic endpoint (for trying things out).")
@click.option("--confirm", is_flag=True, help="Actually write the drafts into the page file.")
def gen(page_path, topic, turns, parent_id, config_path, mock_llm, confirm):
    """Draft a dialog with the configured LLM; writes only with --confirm."""
    page = _load_page_or_exit(page_path)
    config = _load_config(config_path)
    llm_config = config.llm
    mock = None
    if mock_llm:
        from .mockllm import MockChatEndpoint

        mock = MockChatEndpoint().start()
        llm_config = llm_mod.LlmConfig(endpoint_url=mock.url, api_key_env_var="DPAGE_MOCK_KEY")
    if llm_config is None:
        click.echo("error: no LLM endpoint configured (pass --config or --mock-llm)", err=True)
        sys.exit(1)
    try:
        drafts = llm_mod.generate_dialog(page.personas, topic, turns, llm_config)
    except DpageError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    finally:
        if mock is not None:
            mock.stop()
    for cell in drafts:
        persona = page.persona(cell.persona_id)
        name = persona.name if persona else cell.persona_id
        click.echo(f"[{cell.id}] {name}: {cell.source}")
    if not confirm:
        click.echo(f"\n{len(drafts)} draft cells (unverified). Re-run with --confirm to add them to the page.")
        return
    grafted = llm_mod.graft_dialog(page, parent_id or page.target_id, drafts)
    Path(page_path).write_bytes(model.save_page(grafted))
    click.echo(f"\nadded {len(drafts)} unverified draft cells under {parent_id or page.target_id!r}")


@main.command()
@click.option("--page", "page_path", required=True, type=click.Path())
@click.option("--port", default=8400, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--state-dir",
    type=click.Path(),
    default=None,
    help="Where reader state is persisted (default: the user data directory).",
)
@click.option("--config", "config_path", type=click.Path(), help="JSON config: LLM endpoint + code runners.")
@click.option("--ui-dir", type=click.Path(), default=None, help="Static reader UI assets to serve at /.")
@click.option("--mock-llm", is_flag=True, help="Answer asks with a local deterministic endpoint.")
@click.option("--multi-user", is_flag=True, help="Persist state per session instead of per page.")
def serve(page_path, port, host, state_dir, config_path, ui_dir, mock_llm, multi_user):
    """Serve a page to reader UIs; refuses pages that do not validate."""
    import uvicorn

    page = _load_page_or_exit(page_path)
    config = _load_config(config_path)
    llm_config = config.llm
    if mock_llm:
        from .mockllm import MockChatEndpoint

        mock = MockChatEndpoint().start()
        llm_config = llm_mod.LlmConfig(endpoint_url=mock.url, api_key_env_var="DPAGE_MOCK_KEY")
        click.echo(f"mock LLM endpoint at {mock.url}")
    from .statestore import default_state_dir

    app = create_app(
        page,
        state_dir=state_dir or default_state_dir(),
        llm_config=llm_config,
        runner_config=config.runners,
        multi_user=multi_user,
        ui_dir=ui_dir,
    )
    click.echo(f"serving {page.title!r} ({page_path}) on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--page", "page_path", required=True, type=click.Path())
@click.option("--out", "-o", "out_dir", required=True, type=click.Path(), help="Directory for the web pages.")
def export(page_path, out_dir):
    """Export the target-path thread as a static webpage."""
    page = _load_page_or_exit(page_path)
    index = export_static(page, out_dir)
    click.echo(f"wrote {index}")


if __name__ == "__main__":
    main()
