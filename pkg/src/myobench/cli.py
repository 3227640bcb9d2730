"""Command-line surface: synth / extract / robustness / classify.

Every command that takes --seed is bit-reproducible, and every output file
carries its fully resolved configuration (embedded in JSON outputs, a
``.config.json`` sidecar next to CSV outputs). Exit codes: 0 on success,
1 on runtime/data errors, 2 on usage errors.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import click

from . import __version__
from .dataio import (ClassSpec, Dataset, DatasetError, SynthConfig,
                     default_class_specs, load_dataset, save_dataset, synthesize_emg)
from .recognition import (DEFAULT_VOTE_WINDOW, decisions_to_csv,
                          evaluate_feature_sets, table_to_csv, table_to_json)
from .registry import (default_panel, feature_set, parse_features,
                       resolve_hemg_limit)
from .robustness import (RobustnessConfig, grid_to_csv, grid_to_json,
                         records_from_dataset, run_grid, sweep_parameters)
from .signals import SegmentationConfig, segment, segment_offsets


@click.group()
@click.version_option(__version__, prog_name="myobench")
def main():
    """sEMG feature extraction, WGN robustness benchmarking, and LDA recognition."""


def _fail(exc: Exception):
    raise click.ClickException(str(exc))


def _parse_band(text: str) -> tuple[float, float]:
    try:
        lo, _, hi = text.partition("-")
        return float(lo), float(hi)
    except ValueError:
        raise click.BadParameter(f"band must look like '20-450', got {text!r}")


def _load(path: str) -> Dataset:
    try:
        return load_dataset(path)
    except DatasetError as exc:
        _fail(exc)


def _segmentation(window_ms: float, slide_ms: float) -> SegmentationConfig:
    try:
        return SegmentationConfig(window_ms=window_ms, slide_ms=slide_ms)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


@main.command()
@click.option("--classes", "n_classes", default=4, show_default=True,
              help="Number of synthetic gesture classes.")
@click.option("--channels", default=2, show_default=True)
@click.option("--trials", default=6, show_default=True, help="Trials per class.")
@click.option("--duration-ms", default=3000.0, show_default=True)
@click.option("--rate", default=1000.0, show_default=True, help="Sampling rate (Hz).")
@click.option("--seed", default=0, show_default=True)
@click.option("--band", "bands", multiple=True,
              help="Per-class band 'lo-hi' in Hz (repeat per class; default: "
                   "disjoint bands over 30-450 Hz).")
@click.option("--amplitude", "amplitudes", multiple=True, type=float,
              help="Per-class RMS amplitude in mV (repeat per class).")
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
def synth(n_classes, channels, trials, duration_ms, rate, seed, bands, amplitudes, out):
    """Generate a synthetic labeled sEMG dataset (manifest + trial CSVs)."""
    specs = default_class_specs(n_classes)
    if bands:
        if len(bands) != n_classes:
            raise click.BadParameter(f"need {n_classes} --band options, got {len(bands)}")
        parsed = [_parse_band(b) for b in bands]
        specs = [ClassSpec(name=s.name, band=band, amplitude=s.amplitude, group=s.group)
                 for s, band in zip(specs, parsed)]
    if amplitudes:
        if len(amplitudes) != n_classes:
            raise click.BadParameter(
                f"need {n_classes} --amplitude options, got {len(amplitudes)}")
        specs = [ClassSpec(name=s.name, band=s.band, amplitude=a, group=s.group)
                 for s, a in zip(specs, amplitudes)]
    try:
        cfg = SynthConfig(classes=tuple(specs), channels=channels,
                          trials_per_class=trials, trial_ms=duration_ms,
                          rate=rate, seed=seed)
        dataset = synthesize_emg(cfg)
        manifest = save_dataset(dataset, out)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    config = {
        "command": "synth", "seed": seed, "rate_hz": rate,
        "channels": channels, "trials_per_class": trials,
        "duration_ms": duration_ms,
        "classes": [{"name": s.name, "band_hz": list(s.band),
                     "amplitude_mv": s.amplitude, "group": s.group} for s in specs],
    }
    (Path(out) / "manifest.json.config.json").write_text(
        json.dumps(config, indent=2) + "\n")
    click.echo(f"wrote {manifest} ({len(dataset.trials)} trials)")


@main.command()
@click.option("--data", required=True, type=click.Path(), help="Manifest path.")
@click.option("--features", default="rms,mav,wl", show_default=True,
              help="Comma-separated feature list (name[:key=value...]).")
@click.option("--window-ms", default=256.0, show_default=True)
@click.option("--slide-ms", default=64.0, show_default=True)
@click.option("--out", required=True, type=click.Path(), help="Output CSV.")
def extract(data, features, window_ms, slide_ms, out):
    """Window every trial and write one feature row per window."""
    try:
        descriptors = parse_features(features)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    dataset = _load(data)
    seg_cfg = _segmentation(window_ms, slide_ms)
    try:
        descriptors = resolve_hemg_limit(
            descriptors,
            (t.data[:, ch] for t in dataset.trials for ch in range(len(t.channels))),
        )
        header = ["trial_id", "label", "group", "window_start_ms"]
        for ch_name in dataset.trials[0].channels:
            for desc in descriptors:
                header.extend(f"{ch_name}:{c}" for c in desc.component_names())
        out_path = Path(out)
        if out_path.parent != Path("."):
            out_path.parent.mkdir(parents=True, exist_ok=True)
        with out_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            n_rows = 0
            for trial in dataset.trials:
                offsets = segment_offsets(trial.signal(0, dataset.rate), seg_cfg)
                per_channel = [segment(trial.signal(ch, dataset.rate), seg_cfg)
                               for ch in range(len(trial.channels))]
                for w_idx, offset in enumerate(offsets):
                    row = [trial.trial_id, trial.label, trial.group,
                           f"{offset * 1000.0 / dataset.rate:g}"]
                    for windows in per_channel:
                        for desc in descriptors:
                            row.extend(f"{v:.10g}"
                                       for v in desc.compute(windows[w_idx], dataset.rate))
                    writer.writerow(row)
                    n_rows += 1
    except ValueError as exc:
        _fail(exc)
    config = {"command": "extract", "data": str(data), "features": features,
              "window_ms": window_ms, "slide_ms": slide_ms}
    out_path.with_suffix(out_path.suffix + ".config.json").write_text(
        json.dumps(config, indent=2) + "\n")
    click.echo(f"wrote {out_path} ({n_rows} windows)")


def _parse_sweep(text: str):
    # family:param=10..50:10  or  family:param=3,5,7,9,11
    try:
        family, _, rest = text.partition(":")
        param, _, values_text = rest.partition("=")
        if not (family and param and values_text):
            raise ValueError
        if ".." in values_text:
            span, _, step_text = values_text.partition(":")
            start_text, _, stop_text = span.partition("..")
            start, stop = float(start_text), float(stop_text)
            step = float(step_text) if step_text else 1.0
            if step <= 0 or stop < start:
                raise ValueError
            count = int(round((stop - start) / step)) + 1
            values = [start + i * step for i in range(count)]
        else:
            values = [float(v) for v in values_text.split(",")]
        return family.strip(), param.strip(), values
    except ValueError:
        raise click.BadParameter(
            f"sweep must look like 'wamp:threshold=10..50:10' or "
            f"'hemg:bins=3,5,7,9,11', got {text!r}"
        )


@main.command()
@click.option("--data", required=True, type=click.Path(), help="Manifest path.")
@click.option("--features", default=None,
              help="Feature list (default: the representative robustness panel).")
@click.option("--snr", default="20,15,10,5,3,0", show_default=True,
              help="Comma-separated SNR grid in dB.")
@click.option("--reps", default=10, show_default=True, help="Repetitions per level.")
@click.option("--seed", default=0, show_default=True)
@click.option("--window-ms", default=256.0, show_default=True)
@click.option("--slide-ms", default=64.0, show_default=True)
@click.option("--max-windows", default=1, show_default=True,
              help="Windows kept per trial channel (0 = all).")
@click.option("--groups", default=None, help="Restrict to these signal groups.")
@click.option("--sweep", default=None,
              help="Parameter sweep instead of a feature panel, e.g. "
                   "'wamp:threshold=10..50:10'.")
@click.option("--out", required=True, type=click.Path(),
              help="Output prefix; writes <out>.csv and <out>.json.")
def robustness(data, features, snr, reps, seed, window_ms, slide_ms,
               max_windows, groups, sweep, out):
    """Percentage-error benchmark of features under SNR-calibrated WGN."""
    try:
        snr_grid = tuple(float(s) for s in snr.split(",") if s.strip())
        if not snr_grid:
            raise ValueError("empty SNR grid")
    except ValueError as exc:
        raise click.BadParameter(f"bad --snr: {exc}")
    if sweep is not None and features is not None:
        raise click.BadParameter("--sweep and --features are mutually exclusive")
    try:
        descriptors = default_panel() if features is None else parse_features(features)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    dataset = _load(data)
    seg_cfg = _segmentation(window_ms, slide_ms)
    cfg = RobustnessConfig(
        snr_grid=snr_grid, repetitions=reps, seed=seed,
        groups=tuple(g.strip() for g in groups.split(",")) if groups else None,
    )
    try:
        records = records_from_dataset(
            dataset, seg_cfg, max_windows=None if max_windows == 0 else max_windows)
        if sweep is not None:
            family, param, values = _parse_sweep(sweep)
            grid = sweep_parameters(records, family, param, values, cfg)
        else:
            grid = run_grid(records, descriptors, cfg)
    except ValueError as exc:
        _fail(exc)
    grid.config["command"] = "robustness"
    grid.config["data"] = str(data)
    grid.config["window_ms"] = window_ms
    grid.config["slide_ms"] = slide_ms
    grid.config["max_windows"] = max_windows
    out = Path(out)
    if out.parent != Path("."):
        out.parent.mkdir(parents=True, exist_ok=True)
    grid_to_csv(grid, out.with_suffix(".csv"))
    grid_to_json(grid, out.with_suffix(".json"))
    click.echo(f"wrote {out.with_suffix('.csv')} and {out.with_suffix('.json')} "
               f"({len(grid.rows)} cells)")


@main.command()
@click.option("--data", required=True, type=click.Path(), help="Manifest path.")
@click.option("--sets", default="hudgins,oskoei,robust", show_default=True,
              help="Feature sets: aliases or name=feat+feat definitions.")
@click.option("--noise", default="clean,20,15,10", show_default=True,
              help="Noise levels: 'clean' and/or SNRs in dB.")
@click.option("--vote", default=DEFAULT_VOTE_WINDOW, show_default=True,
              help="Majority-vote window (odd).")
@click.option("--window-ms", default=256.0, show_default=True)
@click.option("--slide-ms", default=64.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(),
              help="Output prefix; writes <out>_table.csv, <out>_report.json, "
                   "and per-cell decision CSVs.")
def classify(data, sets, noise, vote, window_ms, slide_ms, seed, out):
    """Leave-one-out recognition of feature sets across noise levels."""
    try:
        feature_sets = dict(feature_set(token) for token in sets.split(",") if token.strip())
        if not feature_sets:
            raise ValueError("empty feature-set list")
        levels: list[float | None] = []
        for token in noise.split(","):
            token = token.strip()
            if not token:
                continue
            levels.append(None if token.lower() == "clean" else float(token))
        if not levels:
            raise ValueError("empty noise-level list")
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    dataset = _load(data)
    seg_cfg = _segmentation(window_ms, slide_ms)
    try:
        table = evaluate_feature_sets(dataset, feature_sets, levels, seg_cfg,
                                      vote_window=vote, seed=seed)
    except ValueError as exc:
        _fail(exc)
    config = {
        "command": "classify", "data": str(data), "sets": sets, "noise": noise,
        "vote_window": vote, "window_ms": window_ms, "slide_ms": slide_ms,
        "seed": seed,
    }
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    table_to_csv(table, Path(f"{out}_table.csv"), config)
    table_to_json(table, Path(f"{out}_report.json"), config)
    for (set_name, level_label), report in table.reports.items():
        decisions_to_csv(report, Path(f"{out}_decisions_{set_name}_{level_label}.csv"))
    click.echo(f"wrote {out}_table.csv, {out}_report.json, and "
               f"{len(table.reports)} decision streams")


if __name__ == "__main__":
    main()
