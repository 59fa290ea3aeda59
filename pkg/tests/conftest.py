import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py

from corpuscope.fixtures import generate_fixture
from corpuscope.pipeline import PipelineConfig, run_pipeline


@pytest.fixture(scope="session")
def small_fixture(tmp_path_factory) -> Path:
    """A 60-document generated corpus with its resources."""
    root = tmp_path_factory.mktemp("fixture-small")
    generate_fixture(root, doc_count=60, seed=11)
    return root


def fixture_pipeline_config(fixture_root: Path, index_dir: Path, workers: int = 1) -> PipelineConfig:
    res = fixture_root / "resources"
    return PipelineConfig(
        input_dir=fixture_root / "corpus",
        index_dir=index_dir,
        collection_name="fixture",
        dictionaries=[("equipment", res / "dict-equipment.txt", "any")],
        gazetteers=[res / "gazetteer.tsv"],
        reference_stats={
            lang: res / f"refstats.{lang}.tsv" for lang in ("en", "es", "de", "hu")
        },
        workers=workers,
    )


@pytest.fixture(scope="session")
def small_index_dir(small_fixture, tmp_path_factory) -> Path:
    """The small fixture ingested once for read-only tests."""
    index_dir = tmp_path_factory.mktemp("index-small") / "idx"
    run_pipeline(fixture_pipeline_config(small_fixture, index_dir))
    return index_dir
