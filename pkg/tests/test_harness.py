"""Config validation, pipeline commands, report structure, CLI exit codes."""

import json
import shutil
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from rankcut import harness
from rankcut.cli import main as cli_main
from rankcut.errors import ConfigError
from rankcut.simulate import evaluate_prediction
from rankcut.synthdata import generate_dataset

DATA = Path(__file__).resolve().parent.parent / "data" / "synthetic"


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A private copy of a small synthetic dataset plus its config."""
    root = tmp_path_factory.mktemp("ws")
    generate_dataset(root, n_queries=8, depth=40, seed=99)
    return root


@pytest.fixture(scope="module")
def config(workspace):
    return harness.load_config(workspace / "config.json")


@pytest.fixture(scope="module")
def sweep_cache(config):
    return harness.cmd_sweep(config)


def test_config_requires_existing_paths(tmp_path):
    cfg = {
        "schema_version": 1,
        "paths": {
            "retrieved_run": "missing.run",
            "reranked_run": "missing.run",
            "qrels": "missing.txt",
            "sweep_cache": "out/c.csv",
            "targets_dir": "out/t",
            "features_dir": "out/f",
            "predictions_dir": "out/p",
            "reports_dir": "out/r",
        },
        "metric": "ndcg_at_10",
        "eet_presets": [{"beta": 0}],
        "cost_model": {"per_item_latency": 0.01},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    with pytest.raises(ConfigError, match="does not exist"):
        harness.load_config(path)


def test_config_schema_version(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"schema_version": 99, "paths": {}}))
    with pytest.raises(ConfigError, match="schema_version"):
        harness.load_config(path)


def test_config_duplicate_betas(workspace, tmp_path):
    raw = json.loads((workspace / "config.json").read_text())
    raw["eet_presets"] = [{"beta": 1.0}, {"beta": 1.0}]
    alt = workspace / "dup.json"
    alt.write_text(json.dumps(raw))
    with pytest.raises(ConfigError, match="duplicate beta"):
        harness.load_config(alt)


def test_sweep_cache_shape_and_determinism(config, sweep_cache, workspace):
    text = sweep_cache.read_text()
    lines = text.splitlines()
    assert lines[0] == "# metric=ndcg_at_10"
    assert lines[1] == "query_id,k,value"
    # 8 queries at depth 40: 8 * 41 value rows
    assert len(lines) == 2 + 8 * 41

    harness.cmd_sweep(config)
    assert sweep_cache.read_text() == text

    matrix = harness.load_sweep_cache(config)
    assert len(matrix.rows) == 8
    assert all(matrix[qid].size == 41 for qid in matrix.query_ids)


def test_cache_round_trip_is_lossless(config, sweep_cache):
    from rankcut.simulate import sweep

    pair, qrels = harness.load_pair(config)
    direct = sweep(pair, qrels, config.metric)
    cached = harness.load_sweep_cache(config)
    for qid in direct.query_ids:
        assert np.array_equal(direct[qid], cached[qid])


def test_oracle_outputs(config, sweep_cache):
    pred_path, cdf_path = harness.cmd_oracle(config)
    lines = cdf_path.read_text().splitlines()
    assert lines[0].startswith("# zero_fraction=")
    assert lines[1] == "k,cum_fraction"
    fractions = [float(line.split(",")[1]) for line in lines[2:]]
    assert fractions == sorted(fractions)
    assert fractions[-1] == 1.0


def test_oracle_cdf_counting(tmp_path, workspace):
    """Forced oracle cut-offs {0, 0, 10, 50} give CDF (0,.5) (10,.75) (50,1)."""
    raw = json.loads((workspace / "config.json").read_text())
    raw["paths"]["sweep_cache"] = str(tmp_path / "cache.csv")
    raw["paths"]["predictions_dir"] = str(tmp_path / "preds")
    raw["paths"]["reports_dir"] = str(tmp_path / "reports")
    cfg_path = workspace / "cdf_case.json"
    cfg_path.write_text(json.dumps(raw))
    config = harness.load_config(cfg_path)

    lines = ["# metric=ndcg_at_10", "query_id,k,value"]
    peaks = {"qa": 0, "qb": 0, "qc": 10, "qd": 50}
    for qid, peak in peaks.items():
        for k in range(51):
            lines.append(f"{qid},{k},{1.0 if k == peak else 0.5!r}")
    config.sweep_cache.parent.mkdir(parents=True, exist_ok=True)
    config.sweep_cache.write_text("\n".join(lines) + "\n")

    _, cdf_path = harness.cmd_oracle(config)
    rows = cdf_path.read_text().splitlines()
    assert rows[0] == "# zero_fraction=0.5"
    assert rows[2:] == ["0,0.5", "10,0.75", "50,1.0"]


def test_targets_and_features(config, sweep_cache):
    target_paths = harness.cmd_targets(config)
    assert [p.name for p in target_paths] == [
        "targets_beta0.txt",
        "targets_beta1.txt",
        "targets_beta2.txt",
    ]
    feature_paths = harness.cmd_features(config)
    assert len(feature_paths) == 3
    first = json.loads(feature_paths[0].read_text().splitlines()[0])
    assert first["schema_version"] == "v1"
    assert len(first["records"]) == 40
    assert len(first["targets"]) == 41
    assert "dense_embedding" in first["records"][0]


def test_truncate_commands(config, sweep_cache):
    fixed = harness.cmd_truncate(config, "fixed_k", k=10)
    assert fixed.name == "fixed_k_10.tsv"
    greedy = harness.cmd_truncate(config, "greedy_k", beta=1.0)
    assert greedy.name == "greedy_k_beta1.tsv"
    surprise = harness.cmd_truncate(config, "surprise")
    assert surprise.name == "surprise.tsv"
    diag = surprise.parent / "surprise_diagnostics.jsonl"
    assert diag.exists()
    assert len(diag.read_text().splitlines()) == 8
    with pytest.raises(ConfigError):
        harness.cmd_truncate(config, "fixed_k")
    with pytest.raises(ConfigError):
        harness.cmd_truncate(config, "greedy_k", beta=7.0)


def test_evaluate_report(config, sweep_cache):
    preds = [
        harness.cmd_truncate(config, "fixed_k", k=k) for k in (10, 20, 40)
    ]
    # rename fixed_k_40 cannot be a baseline; config asks for fixed_k_20/100?
    csv_path, txt_path = harness.cmd_evaluate(config, preds)
    csv_lines = csv_path.read_text().splitlines()
    header = csv_lines[0].split(",")
    assert header[:4] == ["method", "avg_k", "ndcg_at_10", "latency_s"]
    assert all(col.startswith("sig_vs_") for col in header[4:])
    methods = [line.split(",")[0] for line in csv_lines[1:]]
    assert methods[0] == "w/o re-ranking" and methods[-1] == "oracle"

    table = harness.build_report_table(config, preds)
    oracle_row = table.row("oracle")
    for row in table.rows:
        assert oracle_row.mean_metric >= row.mean_metric
    no_rr = table.row("w/o re-ranking")
    assert no_rr.avg_k == 0.0
    assert no_rr.mean_latency == config.cost_model.fixed_overhead

    text = txt_path.read_text()
    assert "Method" in text and "Avg. k" in text and "Lat." in text


def test_evaluate_identical_files_not_significant(config, sweep_cache, tmp_path):
    baselines = [
        harness.cmd_truncate(config, "fixed_k", k=20),
        harness.cmd_truncate(config, "fixed_k", k=40),
    ]
    p1 = harness.cmd_truncate(config, "fixed_k", k=10)
    p2 = tmp_path / "copy_of_fixed.tsv"
    shutil.copy(p1, p2)
    # rename the method so it is a distinct row
    p2.write_text(p1.read_text().replace("fixed_k_10", "fixed_k_10_copy"))
    table = harness.build_report_table(config, baselines + [p1, p2])
    a = table.row("fixed_k_10")
    b = table.row("fixed_k_10_copy")
    assert a.mean_metric == b.mean_metric and a.avg_k == b.avg_k
    # identical per-query values are never significant against each other
    for baseline in table.baselines:
        assert table.significant[("fixed_k_10", baseline)] == table.significant[
            ("fixed_k_10_copy", baseline)
        ]


def test_harness_row_matches_library_evaluation(config, sweep_cache):
    """The cache-backed oracle row equals a from-scratch evaluation."""
    matrix = harness.load_sweep_cache(config)
    pair, qrels = harness.load_pair(config)
    from rankcut.simulate import oracle_predictions

    pred = oracle_predictions(matrix)
    lib_row = evaluate_prediction(pred, pair, qrels, config.metric, config.cost_model)
    _, rows = harness.build_report_rows(config, [])
    harness_row = rows[-1]
    assert harness_row.method_name == "oracle"
    assert harness_row.avg_k == lib_row.avg_k
    assert harness_row.mean_metric == lib_row.mean_metric
    assert harness_row.mean_latency == lib_row.mean_latency
    assert dict(harness_row.per_query_metric) == dict(lib_row.per_query_metric)


def test_plotdata_outputs(config, sweep_cache):
    preds = [harness.cmd_truncate(config, "fixed_k", k=10)]
    written = harness.cmd_plotdata(config, preds, svg=True)
    by_name = {p.name: p for p in written}
    frontier = by_name["frontier.csv"].read_text().splitlines()
    assert len(frontier) == 1 + len(config.frontier_ks)

    hist = by_name["histogram_fixed_k_10.csv"].read_text().splitlines()
    counts = [int(line.split(",")[2]) for line in hist[1:]]
    assert len(counts) == 20
    assert sum(counts) == 8  # one entry per query

    svg = by_name["scatter.svg"]
    tree = ET.parse(svg)  # valid XML
    assert svg.stat().st_size < 200_000
    assert tree.getroot().tag.endswith("svg")


def test_histogram_top_edge_inclusive():
    bins = harness._histogram([100, 0, 99, 5], 100)
    assert sum(count for _, _, count in bins) == 4
    assert bins[-1][2] == 2  # 99 and 100 both land in the last bin


def test_cli_exit_codes(workspace, tmp_path):
    runner = CliRunner()
    ok = runner.invoke(cli_main, ["sweep", "--config", str(workspace / "config.json")])
    assert ok.exit_code == 0

    missing = runner.invoke(cli_main, ["sweep", "--config", str(tmp_path / "nope.json")])
    assert missing.exit_code == 2

    raw = json.loads((workspace / "config.json").read_text())
    raw["paths"]["qrels"] = "definitely_missing.txt"
    bad = workspace / "bad.json"
    bad.write_text(json.dumps(raw))
    invalid = runner.invoke(cli_main, ["oracle", "--config", str(bad)])
    assert invalid.exit_code == 2


def test_cli_truncate_and_evaluate(workspace):
    runner = CliRunner()
    cfg = str(workspace / "config.json")
    for args in (
        ["sweep", "--config", cfg],
        ["targets", "--config", cfg],
        ["truncate", "--config", cfg, "--method", "fixed_k", "--k", "20"],
        ["truncate", "--config", cfg, "--method", "fixed_k", "--k", "40"],
    ):
        result = runner.invoke(cli_main, args)
        assert result.exit_code == 0, (args, result.output)
    preds_dir = workspace / "out" / "predictions"
    result = runner.invoke(
        cli_main,
        [
            "evaluate",
            "--config",
            cfg,
            str(preds_dir / "fixed_k_20.tsv"),
            str(preds_dir / "fixed_k_40.tsv"),
        ],
    )
    assert result.exit_code == 0, result.output
    assert (workspace / "out" / "reports" / "evaluation.txt").exists()
