import os

# Single-thread BLAS: the kernels here are tiny, so thread pools only add
# overhead and nondeterminism across thread counts.  Must run before numpy
# first loads.
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def small_corpus():
    from infostatus.synth import SynthConfig, gen_synthetic

    return gen_synthetic(SynthConfig(docs=12, sentences_per_doc=12), seed=42)
