"""Command line: one-shot completion, the HTTP server, and log analysis.

Configuration precedence is flags, then MODELMATE_* environment
variables, then an optional key=value config file.  Exit codes for
``complete``: 1 bad input, 2 provider/config trouble, 3 mock miss.
"""

from __future__ import annotations

import json
import logging
import os
import random
import sys
from pathlib import Path

import click

from .catalog import load_catalog
from .dsl import parse_model, serialize_model
from .errors import (
    ConfigError,
    EmptyModel,
    MalformedRow,
    MetricsError,
    MockMiss,
    ModelMateError,
    ParseError,
    ProviderError,
    UnknownCandidate,
)
from .gateway import DEFAULT_MODEL, Gateway, HttpProvider, MockProvider
from .model import AssociationPayload, AttributePayload, Candidate, ClassPayload, Model
from .metrics import SynonymBags, analyze_sessions, parse_time_limit, render_report
from .recommend import RecommenderConfig, SuggestionSet, run_iteration
from .sessionlog import parse_log

log = logging.getLogger(__name__)

_KIND_ALIASES = {
    "class": "classes",
    "classes": "classes",
    "attr": "attributes",
    "attribute": "attributes",
    "attributes": "attributes",
    "assoc": "associations",
    "association": "associations",
    "associations": "associations",
}

_EDGE_GLYPHS = {
    "association": "-->",
    "aggregation": "o--",
    "composition": "*--",
    "inheritance": "-|>",
}


def _load_config_file(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    values: dict[str, str] = {}
    try:
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"config line without '=': {raw!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    return values


def _resolve(flag, env_key: str, config: dict[str, str], config_key: str, default=None):
    if flag is not None:
        return flag
    env = os.environ.get(env_key)
    if env is not None:
        return env
    if config_key in config:
        return config[config_key]
    return default


def _build_gateway(mock: str | None, provider_url, api_key, config: dict[str, str]) -> Gateway:
    if mock:
        return Gateway(MockProvider.from_file(mock))
    url = _resolve(provider_url, "MODELMATE_PROVIDER_URL", config, "provider_url")
    if not url:
        raise ConfigError("no provider configured: pass --provider-url, set "
                          "MODELMATE_PROVIDER_URL, or use --mock")
    key = _resolve(api_key, "MODELMATE_API_KEY", config, "api_key")
    return Gateway(HttpProvider(url, key))


def _parse_kinds(raw: str | None) -> set[str] | None:
    if not raw:
        return None
    kinds: set[str] = set()
    for chunk in raw.split(","):
        chunk = chunk.strip().lower()
        if not chunk:
            continue
        if chunk not in _KIND_ALIASES:
            raise ConfigError(f"unknown suggestion kind {chunk!r}")
        kinds.add(_KIND_ALIASES[chunk])
    return kinds or None


def _describe(candidate: Candidate) -> str:
    payload = candidate.payload
    if isinstance(payload, ClassPayload):
        return payload.name
    if isinstance(payload, AttributePayload):
        text = f"{payload.class_name}.{payload.name}: {payload.type_name}"
        if payload.type_warning:
            text += "  (type guessed)"
        return text
    glyph = _EDGE_GLYPHS[payload.kind]
    text = f"{payload.source} {glyph} {payload.target}"
    if payload.name:
        text += f" : {payload.name}"
    return text


def _print_suggestions(suggestions: SuggestionSet) -> None:
    for title, bucket in (
        ("Classes", suggestions.classes),
        ("Attributes", suggestions.attributes),
        ("Associations", suggestions.associations),
    ):
        click.echo(f"{title}:")
        if not bucket:
            click.echo("  (none)")
        for candidate in bucket:
            click.echo(f"  {candidate.confidence:>3}  {_describe(candidate)}")
    for message in suggestions.errors:
        click.echo(f"warning: {message}", err=True)


def _apply_all(model: Model) -> None:
    for kind in ("class", "attribute", "association"):
        for candidate in list(model.candidates.list(kind)):
            try:
                model.accept_candidate(candidate.candidate_id)
            except UnknownCandidate:
                continue  # purged after an earlier accept
            except ModelMateError as err:
                log.warning("skipping %s: %s", candidate.candidate_id, err)


def _fail(message: str, exit_code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(exit_code)


@click.group()
def main() -> None:
    """Domain-model completion assistant."""
    logging.basicConfig(level=os.environ.get("MODELMATE_LOG", "WARNING"))


@main.command()
@click.argument("model_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--kinds", help="comma list: classes,attributes,associations")
@click.option("--n", type=int, default=None, help="prompt repetitions per iteration")
@click.option("--min-frequency", type=int, default=None, help="tally threshold")
@click.option("--mock", type=click.Path(exists=True, dir_okay=False),
              help="answer prompts from this fixture file instead of a provider")
@click.option("--seed", type=int, default=0, show_default=True, help="permutation seed")
@click.option("--apply-all", "apply_all_path", type=click.Path(dir_okay=False),
              help="accept every suggestion and write the grown model here")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_name", default=None, help="completion model name")
@click.option("--provider-url", default=None)
@click.option("--api-key", default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def complete(model_file, kinds, n, min_frequency, mock, seed, apply_all_path,
             catalog_path, model_name, provider_url, api_key, config_path):
    """Suggest completions for the model in MODEL_FILE."""
    try:
        config_values = _load_config_file(config_path)
        catalog = load_catalog(catalog_path)
        model = parse_model(Path(model_file).read_text(encoding="utf-8"))
        gateway = _build_gateway(mock, provider_url, api_key, config_values)
        rec_config = RecommenderConfig(
            n=n if n is not None else int(_resolve(None, "MODELMATE_N", config_values, "n", 3)),
            min_frequency=min_frequency,
            model_name=model_name
            or _resolve(None, "MODELMATE_MODEL", config_values, "model", DEFAULT_MODEL),
        )
        suggestions = run_iteration(
            model, catalog, gateway, rec_config, random.Random(seed), _parse_kinds(kinds)
        )
        _print_suggestions(suggestions)
        if apply_all_path:
            _apply_all(model)
            Path(apply_all_path).write_text(serialize_model(model), encoding="utf-8")
            click.echo(f"wrote {apply_all_path}")
    except (ParseError, EmptyModel) as err:
        _fail(str(err), 1)
    except MockMiss as err:
        _fail(str(err), 3)
    except (ProviderError, ConfigError) as err:
        _fail(str(err), 2)
    except ModelMateError as err:
        _fail(str(err), 2)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--mock", type=click.Path(exists=True, dir_okay=False),
              help="serve against a fixture file instead of a live provider")
@click.option("--persist-dir", type=click.Path(file_okay=False),
              help="write each ended session's .dm and .csv here")
@click.option("--debounce", type=float, default=0.5, show_default=True,
              help="seconds to coalesce automatic refreshes")
@click.option("--static", "static_dir", type=click.Path(exists=True, file_okay=False),
              help="also serve this directory of web UI assets at /")
@click.option("--n", type=int, default=None)
@click.option("--model", "model_name", default=None)
@click.option("--provider-url", default=None)
@click.option("--api-key", default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def serve(host, port, catalog_path, mock, persist_dir, debounce, static_dir, n, model_name,
          provider_url, api_key, config_path):
    """Run the HTTP session service."""
    import uvicorn

    from .service import create_app

    try:
        config_values = _load_config_file(config_path)
        gateway = _build_gateway(mock, provider_url, api_key, config_values)
        rec_config = RecommenderConfig(
            n=n if n is not None else int(_resolve(None, "MODELMATE_N", config_values, "n", 3)),
            model_name=model_name
            or _resolve(None, "MODELMATE_MODEL", config_values, "model", DEFAULT_MODEL),
        )
        app = create_app(
            gateway,
            catalog=load_catalog(catalog_path),
            config=rec_config,
            debounce_seconds=debounce,
            persist_dir=persist_dir,
            static_dir=static_dir,
        )
    except (ConfigError, ProviderError) as err:
        _fail(str(err), 2)
        return
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.argument("logdir", type=click.Path(exists=True, file_okay=False))
@click.option("--bags", "bags_path", type=click.Path(exists=True, dir_okay=False),
              help="synonym bags file: one comma-separated bag per line")
@click.option("--limit", default="10:00", show_default=True,
              help="completion limit as MM:SS")
@click.option("--group-by", default="mode", show_default=True,
              type=click.Choice(["mode"]), help="session grouping for the tables")
@click.option("--json", "as_json", is_flag=True, help="emit the report as JSON")
def analyze(logdir, bags_path, limit, group_by, as_json):
    """Compute study metrics over every .csv session log in LOGDIR."""
    try:
        limit_seconds = parse_time_limit(limit)
        paths = sorted(Path(logdir).glob("*.csv"))
        if not paths:
            raise ConfigError(f"no .csv logs in {logdir}")
        sessions = [parse_log(p.read_text(encoding="utf-8")) for p in paths]
        bags = SynonymBags.from_file(bags_path) if bags_path else None
        report = analyze_sessions(sessions, bags, limit_seconds)
    except (MalformedRow, ValueError) as err:
        _fail(str(err), 1)
        return
    except MetricsError as err:
        _fail(str(err), 1)
        return
    except ConfigError as err:
        _fail(str(err), 2)
        return
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        click.echo(render_report(report), nl=False)


if __name__ == "__main__":
    main()
