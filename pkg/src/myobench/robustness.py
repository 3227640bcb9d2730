"""White-Gaussian-noise robustness benchmark.

For every (trial record, SNR level, repetition) the runner injects calibrated
noise into the clean signal, re-extracts each feature, and scores the
percentage error

    PE = |(feature_clean - feature_noise) / feature_clean| * 100

Results aggregate to mean/std PE per (feature, group, motion, SNR). Cells
whose clean value is zero (PE undefined) or whose extraction fails are not
averaged; they are counted in the ``excluded`` column instead.

All features at a given (record, SNR, repetition) see the same noise draw,
and each draw's stream is keyed by (seed, record index, SNR index,
repetition), so serial and parallel evaluation orders give bit-identical
grids.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataio import Dataset
from .noise import NoiseSpec, derive_seed, inject_at_snr
from .registry import FeatureDescriptor, resolve_hemg_limit
from .signals import SegmentationConfig, Signal, segment


def percentage_error(clean_value: float, noisy_value: float) -> float:
    """Relative feature deviation in percent; undefined for a zero clean value."""
    if clean_value == 0:
        raise ValueError("percentage error is undefined for a zero clean value")
    return abs((clean_value - noisy_value) / clean_value) * 100.0


@dataclass(frozen=True)
class RobustnessConfig:
    """Benchmark shape: SNR grid, repetitions per level, base seed.

    ``groups`` optionally restricts the run to the named signal groups
    (e.g. strong/weak); ``dry_run`` bypasses injection so every PE is zero,
    which pins the no-noise identity in tests.
    """

    snr_grid: tuple[float, ...] = (20.0, 15.0, 10.0, 5.0, 3.0, 0.0)
    repetitions: int = 10
    seed: int = 0
    groups: tuple[str, ...] | None = None
    dry_run: bool = False

    def __post_init__(self):
        if not self.snr_grid:
            raise ValueError("SNR grid must be non-empty")
        if self.repetitions < 1:
            raise ValueError("need at least one repetition")


@dataclass(frozen=True)
class TrialRecord:
    """One clean signal under test, with its labels for aggregation."""

    signal: Signal
    motion: str
    group: str
    trial_id: str


@dataclass
class GridRow:
    feature: str
    parameters: str
    group: str
    motion: str
    snr_db: float
    mean_pe: float
    std_pe: float
    n: int
    excluded: int


@dataclass
class RobustnessGrid:
    rows: list[GridRow]
    config: dict = field(default_factory=dict)


def records_from_dataset(dataset: Dataset, segmentation: SegmentationConfig | None = None,
                         max_windows: int | None = 1) -> list[TrialRecord]:
    """Turn a dataset into per-channel benchmark records.

    With a segmentation config each trial channel contributes up to
    ``max_windows`` windows (None = all); without one, the whole channel is a
    single record.
    """
    records = []
    for trial in dataset.trials:
        for ch, ch_name in enumerate(trial.channels):
            sig = trial.signal(ch, dataset.rate)
            if segmentation is None:
                records.append(TrialRecord(
                    signal=sig, motion=trial.label, group=trial.group,
                    trial_id=f"{trial.trial_id}/{ch_name}",
                ))
                continue
            windows = segment(sig, segmentation)
            if max_windows is not None:
                windows = windows[:max_windows]
            for w_idx, window in enumerate(windows):
                records.append(TrialRecord(
                    signal=Signal(samples=window, rate=dataset.rate),
                    motion=trial.label, group=trial.group,
                    trial_id=f"{trial.trial_id}/{ch_name}/w{w_idx}",
                ))
    return records


class _Cell:
    __slots__ = ("pes", "excluded")

    def __init__(self):
        self.pes: list[float] = []
        self.excluded = 0


def _feature_pe(desc: FeatureDescriptor, clean: np.ndarray,
                noisy: np.ndarray) -> float | None:
    """Scalarized PE for one sample, or None when the clean value excludes it."""
    if desc.vector_mean:
        mask = clean != 0
        if not np.any(mask):
            return None
        return float(np.mean(np.abs((clean[mask] - noisy[mask]) / clean[mask])) * 100.0)
    clean_scalar = desc.scalarize(clean)
    if clean_scalar == 0:
        return None
    return percentage_error(clean_scalar, desc.scalarize(noisy))


def run_grid(records: list[TrialRecord], features: list[FeatureDescriptor],
             cfg: RobustnessConfig) -> RobustnessGrid:
    """Run the PE benchmark over records x features x SNR grid x repetitions."""
    if cfg.groups is not None:
        records = [r for r in records if r.group in cfg.groups]
    if not records:
        raise ValueError("no trial records to benchmark")
    features = resolve_hemg_limit(features, (r.signal.samples for r in records))

    cells: dict[tuple, _Cell] = {}

    def cell(desc, record, snr) -> _Cell:
        key = (desc.label, record.group, record.motion, snr)
        if key not in cells:
            cells[key] = _Cell()
        return cells[key]

    for r_idx, record in enumerate(records):
        rate = record.signal.rate
        clean_values: dict[int, np.ndarray | None] = {}
        for d_idx, desc in enumerate(features):
            try:
                clean_values[d_idx] = desc.compute(record.signal.samples, rate)
            except ValueError:
                clean_values[d_idx] = None
        for s_idx, snr in enumerate(cfg.snr_grid):
            stream_seed = derive_seed(cfg.seed, r_idx, s_idx)
            for rep in range(cfg.repetitions):
                if cfg.dry_run:
                    noisy_samples = record.signal.samples
                else:
                    spec = NoiseSpec(snr_db=snr, seed=stream_seed, repetition_index=rep)
                    noisy_samples = inject_at_snr(record.signal, spec).samples
                for d_idx, desc in enumerate(features):
                    slot = cell(desc, record, snr)
                    clean = clean_values[d_idx]
                    if clean is None:
                        slot.excluded += 1
                        continue
                    try:
                        noisy = desc.compute(noisy_samples, rate)
                        pe = _feature_pe(desc, clean, noisy)
                    except ValueError:
                        pe = None
                    if pe is None:
                        slot.excluded += 1
                    else:
                        slot.pes.append(pe)

    label_to_params = {d.label: d.param_text for d in features}
    label_to_name = {d.label: d.name for d in features}
    rows = []
    for (label, group, motion, snr), slot in cells.items():
        pes = np.asarray(slot.pes)
        rows.append(GridRow(
            feature=label_to_name[label],
            parameters=label_to_params[label],
            group=group,
            motion=motion,
            snr_db=snr,
            mean_pe=float(np.mean(pes)) if pes.size else float("nan"),
            std_pe=float(np.std(pes)) if pes.size else float("nan"),
            n=int(pes.size),
            excluded=slot.excluded,
        ))
    rows.sort(key=lambda r: (r.feature, r.parameters, r.group, r.motion, -r.snr_db))
    return RobustnessGrid(rows=rows, config=_config_dict(cfg, features))


def sweep_parameters(records: list[TrialRecord], family: str, param: str,
                     values, cfg: RobustnessConfig,
                     base_params: dict | None = None) -> RobustnessGrid:
    """Re-run the grid once per parameter value and merge the slices.

    Noise draws depend only on (seed, record, SNR, repetition), so every
    slice sees identical noise and the slices are directly comparable.
    """
    from .registry import make_descriptor

    values = list(values)
    if not values:
        raise ValueError("parameter sweep needs at least one value")
    all_rows = []
    for value in values:
        params = dict(base_params or {})
        params[param] = value
        grid = run_grid(records, [make_descriptor(family, params)], cfg)
        all_rows.extend(grid.rows)
    config = _config_dict(cfg, [])
    config["sweep"] = {"feature": family, "parameter": param,
                       "values": [float(v) for v in values]}
    return RobustnessGrid(rows=all_rows, config=config)


def _config_dict(cfg: RobustnessConfig, features) -> dict:
    return {
        "snr_grid_db": list(cfg.snr_grid),
        "repetitions": cfg.repetitions,
        "seed": cfg.seed,
        "groups": list(cfg.groups) if cfg.groups is not None else None,
        "dry_run": cfg.dry_run,
        "features": [
            {"name": d.name, "parameters": d.param_text,
             "scalar_component": d.scalar_component, "vector_mean": d.vector_mean}
            for d in features
        ],
    }


_CSV_COLUMNS = ["feature", "parameters", "group", "motion", "snr_db",
                "mean_pe", "std_pe", "n", "excluded"]


def grid_to_csv(grid: RobustnessGrid, path) -> Path:
    """Write the grid as CSV (plot-ready); the resolved config goes to a sidecar."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for row in grid.rows:
            writer.writerow([
                row.feature, row.parameters, row.group, row.motion,
                f"{row.snr_db:g}", f"{row.mean_pe:.10g}", f"{row.std_pe:.10g}",
                row.n, row.excluded,
            ])
    sidecar = path.with_suffix(path.suffix + ".config.json")
    sidecar.write_text(json.dumps(grid.config, indent=2) + "\n")
    return path


def grid_to_json(grid: RobustnessGrid, path) -> Path:
    """Write the grid plus its resolved config as a single JSON document."""
    path = Path(path)
    payload = {
        "config": grid.config,
        "rows": [
            {col: getattr(row, col) for col in _CSV_COLUMNS}
            for row in grid.rows
        ],
    }
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path
