"""Label-driven test generation for MiniC programs."""

from ._core import (
    LabelcovError,
    annotate,
    bench,
    benchmark_names,
    benchmark_source,
    cover,
    explore,
    instrument,
    labels,
    run,
)

__all__ = [
    "LabelcovError",
    "annotate",
    "bench",
    "benchmark_names",
    "benchmark_source",
    "cover",
    "explore",
    "instrument",
    "labels",
    "run",
]
