"""Command-line entry point: serve, simulate, validate, analyze, render,
export. Batch subcommands are idempotent: identical inputs and seed
rewrite identical bytes at deterministic paths."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .agents import AgentPolicy, default_targets, load_scenario
from .config import ConfigError, ExperimentConfig, load_config
from .events import CorruptLogError, EventLog, read_log
from .experiment import Experiment, replay
from .grid import InvalidGridError
from .simulate import run_simulation
from .synth import StimulusCache, get_sentence
from .grid import LatentPoint

EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_CORRUPT = 4


def _fail(code: int, kind: str, detail: str) -> None:
    click.echo(json.dumps({"error": kind, "detail": detail}), err=True)
    sys.exit(code)


def _load(config, override, seed) -> ExperimentConfig:
    overrides = list(override)
    if seed is not None:
        overrides.append(f"seed={seed}")
    try:
        if config is None:
            from .config import config_from_dict, apply_overrides
            return config_from_dict(apply_overrides({}, overrides))
        return load_config(config, overrides)
    except (ConfigError, InvalidGridError) as e:
        _fail(EXIT_CONFIG, "config", str(e))
    except (OSError, json.JSONDecodeError) as e:
        _fail(EXIT_CONFIG, "config", f"cannot read config: {e}")


def _read_log_or_die(path):
    try:
        return read_log(path)
    except CorruptLogError as e:
        _fail(EXIT_CORRUPT, "corrupt-log", str(e))
    except OSError as e:
        _fail(EXIT_RUNTIME, "io", str(e))


def common_options(f):
    f = click.option("--config", type=click.Path(), default=None,
                     help="JSON config file (defaults if omitted).")(f)
    f = click.option("--override", multiple=True, metavar="K=V",
                     help="Dotted-key config override, repeatable.")(f)
    f = click.option("--seed", type=int, default=None,
                     help="Override the experiment seed.")(f)
    return f


@click.group()
def main():
    """Slider-experiment orchestration: serve, simulate, analyze."""


@main.command()
@common_options
@click.option("--log", "log_path", type=click.Path(), required=True,
              help="Event log to create or resume.")
@click.option("--cache-dir", type=click.Path(), required=True)
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(config, override, seed, log_path, cache_dir, host, port):
    """Run the HTTP service until interrupted."""
    import uvicorn
    from .service import build_service, create_app

    cfg = _load(config, override, seed)
    try:
        svc = build_service(cfg, log_path, cache_dir)
    except CorruptLogError as e:
        _fail(EXIT_CORRUPT, "corrupt-log", str(e))
    app = create_app(svc)
    click.echo(f"log: {log_path}")
    click.echo(f"cache: {cache_dir}")
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except Exception as e:
        _fail(EXIT_RUNTIME, "serve", str(e))


@main.command()
@common_options
@click.option("--out", type=click.Path(), required=True,
              help="Output directory for events.jsonl and summary.json.")
@click.option("--scenario", type=click.Path(), default=None,
              help="JSON file with agent targets/policy.")
@click.option("--cache-dir", type=click.Path(), default=None,
              help="Render each iteration's slider batch through this cache.")
@click.option("--skip-ratings", is_flag=True,
              help="Stop after termination; no validation/rating phase.")
def simulate(config, override, seed, out, scenario, cache_dir, skip_ratings):
    """Closed-loop simulated run; deterministic for a given seed."""
    cfg = _load(config, override, seed)
    if scenario is not None:
        try:
            targets, policy, rating_sigma = load_scenario(scenario, cfg)
        except (OSError, KeyError, ValueError) as e:
            _fail(EXIT_CONFIG, "scenario", str(e))
    else:
        targets = default_targets(cfg)
        policy = AgentPolicy(mode="maximizer")
        rating_sigma = 0.25
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / "events.jsonl"
    if log_path.exists():
        log_path.unlink()      # rerun overwrites, never appends
    cache = StimulusCache(cache_dir) if cache_dir else None
    try:
        result = run_simulation(cfg, targets, policy, log_path=log_path,
                                cache=cache, rating_sigma=rating_sigma,
                                with_validation=not skip_ratings)
    except Exception as e:
        _fail(EXIT_RUNTIME, "simulate", str(e))
    result.experiment.log.close()
    summary_path = out_dir / "summary.json"
    summary_path.write_text(
        json.dumps(result.summary(), indent=2, sort_keys=True) + "\n")
    click.echo(str(log_path))
    click.echo(str(summary_path))


@main.command()
@click.option("--log", "log_path", type=click.Path(), required=True)
def validate(log_path):
    """Build the validation stimulus set for a terminated experiment
    (appends to the log; a no-op when already built)."""
    events = _read_log_or_die(log_path)
    state = replay(events)
    if state.config is None:
        _fail(EXIT_RUNTIME, "state", "log has no initialization event")
    if state.validation:
        click.echo(f"validation set already built: "
                   f"{len(state.validation)} items")
        return
    exp = Experiment(state.config, EventLog(log_path))
    now = events[-1].timestamp if events else 0.0
    try:
        items = exp.build_validation_set(now)
    except Exception as e:
        _fail(EXIT_RUNTIME, "validate", str(e))
    finally:
        exp.log.close()
    click.echo(f"validation set built: {len(items)} items")


@main.command()
@click.option("--log", "log_path", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), required=True,
              help="Report directory (tables, figures, summary).")
@click.option("--cache-dir", type=click.Path(), default=None,
              help="Stimulus cache (default: <out>/cache).")
@click.option("--seed", type=int, default=0,
              help="Bootstrap / fold-split seed.")
@click.option("--embedding", type=click.Choice(["prosody", "latent"]),
              default="prosody", help="Vector space for the PCA section.")
def analyze(log_path, out, cache_dir, seed, embedding):
    """Report bundle: contrast curve, PCA, features, classification."""
    from .report import write_report

    events = _read_log_or_die(log_path)
    state = replay(events)
    cache = StimulusCache(cache_dir if cache_dir else Path(out) / "cache")
    try:
        write_report(state, cache, out, seed=seed, embedding_mode=embedding)
    except Exception as e:
        _fail(EXIT_RUNTIME, "analyze", str(e))
    for name in ("report.txt", "summary.json", "contrast.csv", "contrast.png",
                 "pca_scores.csv", "pca.png", "features.csv", "uar.csv"):
        click.echo(str(Path(out) / name))


@main.command()
@common_options
@click.option("--sentence", default="s1", help="Sentence id to synthesize.")
@click.option("--indices", default=None,
              help="Comma-separated grid indices (default: all-zero point).")
@click.option("--out", type=click.Path(), required=True)
def render(config, override, seed, sentence, indices, out):
    """Render one stimulus WAV for a latent grid point."""
    from .synth import encode_wav
    from .synth.render import render as render_point

    cfg = _load(config, override, seed)
    grid = cfg.make_grid()
    try:
        if indices is None:
            point = LatentPoint.origin(grid, cfg.dimensions)
        else:
            idx = tuple(int(v) for v in indices.split(","))
            if len(idx) != cfg.dimensions:
                raise ValueError(f"need {cfg.dimensions} indices")
            point = LatentPoint(idx)
        buf = render_point(point, get_sentence(sentence), grid)
    except Exception as e:
        _fail(EXIT_RUNTIME, "render", str(e))
    Path(out).write_bytes(encode_wav(buf))
    click.echo(str(out))


@main.command()
@click.option("--log", "log_path", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), default=None,
              help="Destination file (stdout if omitted).")
def export(log_path, out):
    """Verify and emit the full event log."""
    events = _read_log_or_die(log_path)
    text = "".join(ev.to_line() + "\n" for ev in events)
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)
        click.echo(str(out))


if __name__ == "__main__":
    main()
