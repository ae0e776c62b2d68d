"""Benchmark harness: YAML manifests in, one CSV row per (instance, algorithm) out."""

import csv
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import TextIO

import yaml
from pydantic import ValidationError

from core import Alphabet, Sample, parse_sample
from errors import ManifestError
from models import BenchInstance, BenchManifest, BenchRow, LearnConfig, RunStats
from services.dfalearn import learn_dfa
from services.ltlflearn import learn_ltlf
from services.oracle import check_dfa, check_formula
from services.sampling import sample_from_dfa, sample_from_pattern, sample_from_text

logger = logging.getLogger(__name__)

CSV_FIELDS = list(BenchRow.model_fields)
_INHERITED = ("count", "min_len", "max_len", "seed")


def load_manifest(path: Path) -> BenchManifest:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    try:
        return BenchManifest.model_validate(data)
    except ValidationError as exc:
        raise ManifestError(f"invalid manifest {path}: {exc}") from exc


def expand_instances(manifest: BenchManifest) -> list[BenchInstance]:
    instances = []
    for inst in manifest.instances:
        # unset generator fields fall back to the manifest-wide values
        update = {f: getattr(manifest, f) for f in _INHERITED if f not in inst.model_fields_set}
        instances.append(inst.model_copy(update={**update, "mode": manifest.mode}))
    grid = manifest.random_dfas
    if grid is not None:
        sizes = [size for size in grid.sizes for _ in range(grid.per_size)]
        for k, size in enumerate(sizes):
            instances.append(BenchInstance(
                id=f"rdfa-{k:02d}-n{size}",
                mode=manifest.mode,
                random_dfa=size,
                alphabet=grid.alphabet,
                count=manifest.count,
                min_len=manifest.min_len,
                max_len=manifest.max_len,
                seed=manifest.seed + k,
            ))
    ids = [inst.id for inst in instances]
    if len(ids) != len(set(ids)):
        raise ManifestError("instance ids must be unique")
    return instances


def build_sample(instance: BenchInstance, base_dir: Path) -> Sample:
    alphabet = Alphabet(symbols=tuple(instance.alphabet))
    if instance.sample is not None:
        path = instance.sample if instance.sample.is_absolute() else base_dir / instance.sample
        try:
            return parse_sample(path.read_bytes())
        except OSError as exc:
            raise ManifestError(f"instance {instance.id!r}: {exc}") from exc
    if instance.random_dfa is not None:
        sample, _ = sample_from_dfa(instance.random_dfa, alphabet, instance.count,
                                    instance.min_len, instance.max_len, instance.seed)
        return sample
    if instance.pattern is not None:
        return sample_from_pattern(instance.pattern, instance.count, instance.min_len,
                                   instance.max_len, instance.seed)
    if instance.formula is not None:
        return sample_from_text(instance.formula, alphabet, instance.count,
                                instance.min_len, instance.max_len, instance.seed)
    raise ManifestError(f"instance {instance.id!r} has no sample source")


def run_instance(instance: BenchInstance, algorithm: str, manifest: BenchManifest,
                 base_dir: Path) -> BenchRow:
    sample = build_sample(instance, base_dir)
    config = LearnConfig(
        algorithm=algorithm,
        size_bound=manifest.size_bound,
        horizon=manifest.horizon,
        total_timeout=manifest.timeout,
        seed=instance.seed,
    )
    if instance.mode == "dfa":
        model, stats = learn_dfa(sample, config)
        verdict = check_dfa(model, sample, manifest.size_bound, manifest.oracle_max_size)
    else:
        model, stats = learn_ltlf(sample, config)
        horizon = manifest.horizon if algorithm == "ssym" else None
        verdict = check_formula(model, sample, manifest.size_bound, manifest.oracle_max_size,
                                horizon=horizon)
    if stats.termination == "timeout":
        verdict = verdict.model_copy(update={"verdict": "skipped"})
    logger.info("%s/%s: %s in %d iterations", instance.id, algorithm,
                stats.termination, stats.iterations)
    return BenchRow(
        instance=instance.id,
        algorithm=algorithm,
        model_size=stats.model_size,
        iterations=stats.iterations,
        solver_calls=stats.solver_calls,
        wall_time=stats.wall_time,
        counterexamples=stats.counterexamples,
        termination=stats.termination,
        verdict=verdict.verdict,
    )


def _run_job(job: tuple[BenchInstance, str, BenchManifest, Path]) -> BenchRow:
    return run_instance(*job)


def run_bench(manifest: BenchManifest, base_dir: Path, jobs: int = 1) -> list[BenchRow]:
    """Rows come back in manifest order regardless of completion order."""
    instances = expand_instances(manifest)
    work = [(inst, algo, manifest, base_dir) for inst in instances for algo in manifest.algorithms]
    if jobs <= 1:
        return [_run_job(job) for job in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_job, work))


def write_csv(rows: list[BenchRow], out: TextIO, omit_timings: bool = False) -> None:
    fields = [f for f in CSV_FIELDS if not (omit_timings and f == "wall_time")]
    writer = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        record = row.model_dump(include=set(fields))
        if "wall_time" in record:
            record["wall_time"] = f"{record['wall_time']:.4f}"
        writer.writerow(record)


def paired(rows: list[BenchRow], first: str, second: str) -> list[tuple[BenchRow, BenchRow]]:
    by_key = {(r.instance, r.algorithm): r for r in rows}
    pairs = []
    for r in rows:
        if r.algorithm == first and (r.instance, second) in by_key:
            pairs.append((r, by_key[(r.instance, second)]))
    return pairs


def _ratio(a: float, b: float) -> float:
    # floor for zero-duration runs
    return max(a, 1e-6) / max(b, 1e-6)


def summarize(rows: list[BenchRow], first: str, second: str) -> dict[str, float]:
    pairs = paired(rows, first, second)
    if not pairs:
        return {}
    iteration_ratios = [_ratio(a.iterations, b.iterations) for a, b in pairs]
    time_ratios = [_ratio(a.wall_time, b.wall_time) for a, b in pairs]
    return {
        "pairs": len(pairs),
        "iterations_geomean": statistics.geometric_mean(iteration_ratios),
        "time_geomean": statistics.geometric_mean(time_ratios),
        "time_median": statistics.median(time_ratios),
        "fewer_or_equal_iterations": sum(a.iterations <= b.iterations for a, b in pairs) / len(pairs),
    }


def format_summary(summary: dict[str, float], first: str, second: str,
                   omit_timings: bool = False) -> str:
    if not summary:
        return f"no paired runs of {first} and {second}"
    parts = [
        f"{first}/{second} over {summary['pairs']} instances:",
        f"iterations geomean {summary['iterations_geomean']:.3f}",
        f"{first} <= {second} on {100 * summary['fewer_or_equal_iterations']:.0f}%",
    ]
    if not omit_timings and not math.isnan(summary["time_geomean"]):
        parts.append(f"time geomean {summary['time_geomean']:.3f}")
        parts.append(f"time median {summary['time_median']:.3f}")
    return " ".join(parts)


STATS_FIELDS = ["algorithm", "model_size", "iterations", "solver_calls", "hypothesis_updates",
                "counterexamples", "wall_time", "termination"]


def write_stats_csv(stats: RunStats, out: TextIO) -> None:
    """One-row summary of a single learning run."""
    writer = csv.DictWriter(out, fieldnames=STATS_FIELDS, lineterminator="\n")
    writer.writeheader()
    record = stats.model_dump(include=set(STATS_FIELDS))
    record["wall_time"] = f"{record['wall_time']:.4f}"
    writer.writerow(record)
