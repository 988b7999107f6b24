//! Criterion benchmarks for the statistics, the contour quadrature and the
//! Monte Carlo harness. Run with `cargo bench -p hidimtest-bench`.
