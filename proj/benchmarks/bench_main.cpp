#include <benchmark/benchmark.h>

// The system libbenchmark_main.a ships stale LTO bytecode on some toolchains,
// so the entry point lives here instead.
BENCHMARK_MAIN();
