//! Criterion benchmarks for the evaluation, verification and classification kernels.
