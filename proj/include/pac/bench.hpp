//
// Microbenchmark harness for the aggregate kernel tiers.
//

#ifndef PAC_BENCH_HPP
#define PAC_BENCH_HPP

#include "pac/datagen.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pac {

struct BenchConfig {
	// updates per (kernel, tier, distribution, groups) cell
	size_t updates = 100000000;
	std::vector<size_t> groups {1};
	std::vector<Distribution> dists {Distribution::UniformInt};
	// subset of count, sum, min, max; empty = all
	std::vector<std::string> kernels;
	uint64_t seed = 1;
	// distinct (hash, value, key) triples, cycled
	size_t block = 1 << 16;
};

struct BenchRow {
	std::string kernel;
	std::string tier;
	std::string distribution;
	size_t rows = 0;
	size_t groups = 0;
	double ns_per_row = 0;
};

std::vector<BenchRow> RunBench(const BenchConfig &cfg);
std::string BenchCsv(const std::vector<BenchRow> &rows);

} // namespace pac

#endif // PAC_BENCH_HPP
