import string
import time
from types import SimpleNamespace

import pytest

from phonodiverge.config import RunConfig
from phonodiverge.report import run_pipeline
from phonodiverge.synth import SynthSpec, gen_synthetic_corpus, isotropic_plan


def graded_spec(
    gaps, dim=8, segments=60, seed=11, emotions=("ANGRY",), systems=("EVC1",)
) -> SynthSpec:
    plans = tuple(
        isotropic_plan("P" + string.ascii_uppercase[i], dim, gap, segments)
        for i, gap in enumerate(gaps)
    )
    return SynthSpec(
        phonemes=plans, dim=dim, emotions=emotions, systems=systems, seed=seed
    )


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Three-phoneme corpus (no gap / moderate / strong), 60 per class."""
    out = tmp_path_factory.mktemp("small_corpus")
    manifest = gen_synthetic_corpus(graded_spec([0.0, 1.5, 6.0]), out)
    return manifest

BIG_GAPS = (0.0, 0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 2.1, 2.4, 2.7, 3.0, 6.0)


@pytest.fixture(scope="session")
def big_run(tmp_path_factory):
    """Twelve-phoneme graded corpus (500 per class) plus a timed full run.

    Shared by the study-scale checks so the expensive pipeline executes
    once per session. ``gap_of`` maps each phoneme label back to the
    mean separation it was generated with.
    """
    out = tmp_path_factory.mktemp("big_corpus")
    manifest = gen_synthetic_corpus(graded_spec(BIG_GAPS, segments=500), out)
    config = RunConfig(
        manifest=str(manifest), out_dir=str(tmp_path_factory.mktemp("big_out")), seed=7
    )
    start = time.perf_counter()
    results = run_pipeline(config)
    seconds = time.perf_counter() - start
    gap_of = {
        "P" + string.ascii_uppercase[i]: gap for i, gap in enumerate(BIG_GAPS)
    }
    return SimpleNamespace(
        manifest=manifest,
        config=config,
        results=results,
        seconds=seconds,
        gap_of=gap_of,
    )
