import io
import math
from pathlib import Path

import pytest

from errors import ManifestError
from models import BenchManifest, BenchRow, RunStats
from services.bench import (
    expand_instances,
    format_summary,
    load_manifest,
    paired,
    run_bench,
    summarize,
    write_csv,
    write_stats_csv,
)

MANIFESTS = Path(__file__).parent.parent / "manifests"


def row(instance: str, algorithm: str, iterations: int, wall_time: float) -> BenchRow:
    return BenchRow(instance=instance, algorithm=algorithm, model_size=2, iterations=iterations,
                    solver_calls=iterations, wall_time=wall_time, counterexamples=0,
                    termination="minimal", verdict="skipped")


@pytest.fixture
def a_plus_manifest(tmp_path) -> Path:
    (tmp_path / "a.txt").write_text("alphabet: a\na\naa\naaa\n")
    path = tmp_path / "bench.yaml"
    path.write_text(
        "mode: dfa\n"
        "algorithms: [sym, ceg]\n"
        "size_bound: 2\n"
        "oracle_max_size: 2\n"
        "instances:\n"
        "  - {id: a-plus, sample: a.txt}\n"
    )
    return path


def test_desk_manifest_expands_to_eight_instances():
    manifest = load_manifest(MANIFESTS / "desk_dfa.yaml")
    instances = expand_instances(manifest)
    assert len(instances) == 8
    assert instances[0].id == "rdfa-00-n2"
    assert [inst.seed for inst in instances] == list(range(8))
    assert {inst.random_dfa for inst in instances} == {2, 3, 4}


def test_pattern_manifest_inherits_generator_settings():
    manifest = load_manifest(MANIFESTS / "ltlf_patterns.yaml")
    instances = expand_instances(manifest)
    assert len(instances) == 10
    assert all(inst.mode == "ltlf" for inst in instances)
    assert all(inst.count == 50 and inst.max_len == 6 for inst in instances)


def test_explicit_fields_win_over_manifest():
    manifest = BenchManifest.model_validate({
        "algorithms": ["sym"],
        "count": 7,
        "instances": [{"id": "x", "random_dfa": 2}, {"id": "y", "random_dfa": 2, "count": 3}],
    })
    x, y = expand_instances(manifest)
    assert x.count == 7
    assert y.count == 3


def test_duplicate_ids_are_rejected():
    manifest = BenchManifest.model_validate({
        "algorithms": ["sym"],
        "instances": [{"id": "x", "random_dfa": 2}, {"id": "x", "random_dfa": 3}],
    })
    with pytest.raises(ManifestError):
        expand_instances(manifest)


def test_repeated_grid_sizes_get_distinct_ids():
    manifest = BenchManifest.model_validate({
        "algorithms": ["sym"],
        "random_dfas": {"sizes": [2, 2], "per_size": 2},
    })
    ids = [inst.id for inst in expand_instances(manifest)]
    assert len(ids) == len(set(ids)) == 4


@pytest.mark.parametrize("text", ["algorithms: [bogus]\n", "algorithms: [sym\n", "- just a list\n"])
def test_bad_manifests(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text)
    with pytest.raises(ManifestError):
        load_manifest(path)


def test_missing_manifest(tmp_path):
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "absent.yaml")


def test_missing_sample_file(tmp_path):
    manifest = BenchManifest.model_validate({
        "algorithms": ["sym"],
        "instances": [{"id": "x", "sample": "nowhere.txt"}],
    })
    with pytest.raises(ManifestError):
        run_bench(manifest, tmp_path)


def test_run_bench_rows(a_plus_manifest):
    manifest = load_manifest(a_plus_manifest)
    rows = run_bench(manifest, a_plus_manifest.parent)
    assert [(r.instance, r.algorithm) for r in rows] == [("a-plus", "sym"), ("a-plus", "ceg")]
    for r in rows:
        assert r.model_size == 2
        assert r.termination == "minimal"
        assert r.verdict == "pass"


def test_csv_without_timings_is_reproducible(a_plus_manifest):
    manifest = load_manifest(a_plus_manifest)
    outputs = []
    for _ in range(2):
        out = io.StringIO()
        write_csv(run_bench(manifest, a_plus_manifest.parent), out, omit_timings=True)
        outputs.append(out.getvalue())
    assert outputs[0] == outputs[1]
    header = outputs[0].splitlines()[0]
    assert header == "instance,algorithm,model_size,iterations,solver_calls,counterexamples,termination,verdict"


def test_csv_with_timings():
    out = io.StringIO()
    write_csv([row("i", "sym", 3, 0.5)], out)
    lines = out.getvalue().splitlines()
    assert "wall_time" in lines[0].split(",")
    assert "0.5000" in lines[1]


def test_pairing_and_summary():
    rows = [
        row("i1", "ceg", 1, 1.0), row("i1", "sym", 2, 2.0),
        row("i2", "ceg", 4, 3.0), row("i2", "sym", 4, 3.0),
        row("i3", "ceg", 5, 1.0),
    ]
    assert len(paired(rows, "ceg", "sym")) == 2
    summary = summarize(rows, "ceg", "sym")
    assert summary["pairs"] == 2
    assert math.isclose(summary["iterations_geomean"], math.sqrt(0.5))
    assert math.isclose(summary["time_geomean"], math.sqrt(0.5))
    assert math.isclose(summary["time_median"], 0.75)
    assert summary["fewer_or_equal_iterations"] == 1.0
    text = format_summary(summary, "ceg", "sym")
    assert "ceg/sym over 2 instances" in text
    assert "time geomean" in text
    assert "time geomean" not in format_summary(summary, "ceg", "sym", omit_timings=True)


def test_summary_without_pairs():
    assert summarize([row("i1", "sym", 1, 1.0)], "ceg", "sym") == {}
    assert format_summary({}, "ceg", "sym") == "no paired runs of ceg and sym"


def test_stats_csv():
    out = io.StringIO()
    write_stats_csv(RunStats(algorithm="sym_dfa", iterations=3, wall_time=0.25, model_size=2), out)
    header, values = out.getvalue().splitlines()
    assert header.startswith("algorithm,model_size,iterations")
    assert values == "sym_dfa,2,3,0,0,0,0.2500,minimal"


def test_parallel_run_keeps_manifest_order(tmp_path):
    (tmp_path / "a.txt").write_text("alphabet: a\na\naa\naaa\n")
    (tmp_path / "ab.txt").write_text("alphabet: a,b\nab\nb\naab\n")
    path = tmp_path / "bench.yaml"
    path.write_text(
        "mode: dfa\n"
        "algorithms: [sym, ceg]\n"
        "size_bound: 2\n"
        "oracle_max_size: 2\n"
        "instances:\n"
        "  - {id: a-plus, sample: a.txt}\n"
        "  - {id: ab, sample: ab.txt}\n"
    )
    manifest = load_manifest(path)
    serial = run_bench(manifest, tmp_path, jobs=1)
    parallel = run_bench(manifest, tmp_path, jobs=2)
    assert [(r.instance, r.algorithm) for r in parallel] == [
        ("a-plus", "sym"), ("a-plus", "ceg"), ("ab", "sym"), ("ab", "ceg"),
    ]
    strip = lambda rows: [r.model_dump(exclude={"wall_time"}) for r in rows]  # noqa: E731
    assert strip(parallel) == strip(serial)
