"""The bundled dataset must be exactly reproducible from its generator."""

from pathlib import Path

import pytest

from rankcut.synthdata import generate_dataset

BUNDLED = Path(__file__).resolve().parent.parent / "data" / "synthetic"

FILES = [
    "config.json",
    "corpus.tsv",
    "embeddings.jsonl",
    "qrels.txt",
    "reranked.run",
    "retrieved.run",
    "predictions/demo_trained.tsv",
]


@pytest.mark.skipif(not BUNDLED.exists(), reason="bundled dataset not present")
def test_bundled_dataset_matches_generator(tmp_path):
    generate_dataset(tmp_path)
    for name in FILES:
        fresh = (tmp_path / name).read_bytes()
        committed = (BUNDLED / name).read_bytes()
        assert fresh == committed, f"{name} drifted from the generator output"


def test_generator_is_seed_deterministic(tmp_path):
    generate_dataset(tmp_path / "a", n_queries=3, depth=20, seed=5)
    generate_dataset(tmp_path / "b", n_queries=3, depth=20, seed=5)
    for name in FILES:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
