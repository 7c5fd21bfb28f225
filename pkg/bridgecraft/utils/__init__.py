"""Number theory, finite distributions, random streams, serialization and benchmarks."""
