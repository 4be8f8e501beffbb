#include "pac/bench.hpp"

#include "pac/aggregates.hpp"
#include "pac/errors.hpp"
#include "pac/hash.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace pac {

namespace {

struct Stream {
	std::vector<uint64_t> hash;
	std::vector<int64_t> val;
	std::vector<uint32_t> key;
};

volatile uint64_t g_sink;

template <class K, class F>
double Time(const Stream &s, size_t groups, size_t updates, F &&update) {
	std::vector<K> states(groups);
	size_t block = s.hash.size();
	auto t0 = std::chrono::steady_clock::now();
	size_t i = 0;
	while (i < updates) {
		size_t n = std::min(block, updates - i);
		for (size_t r = 0; r < n; r++) {
			update(states[s.key[r]], s.hash[r], s.val[r]);
		}
		i += n;
	}
	auto t1 = std::chrono::steady_clock::now();
	uint64_t acc = 0;
	for (auto &k : states) {
		acc += k.mask ^ k.updates;
	}
	g_sink = acc;
	return std::chrono::duration<double, std::nano>(t1 - t0).count() / double(std::max<size_t>(updates, 1));
}

auto kCount = [](auto &k, uint64_t h, int64_t) { k.Update(h); };
auto kValue = [](auto &k, uint64_t h, int64_t v) { k.Update(h, v); };

} // namespace

std::vector<BenchRow> RunBench(const BenchConfig &cfg) {
	std::vector<std::string> kernels = cfg.kernels;
	if (kernels.empty()) {
		kernels = {"count", "sum", "min", "max"};
	}
	std::vector<BenchRow> out;
	for (auto d : cfg.dists) {
		for (size_t g : cfg.groups) {
			g = std::max<size_t>(1, g);
			DistributionSpec spec;
			spec.dist = d;
			spec.rows = std::max<size_t>(1, std::min(cfg.block, cfg.updates));
			spec.seed = cfg.seed;
			spec.groups = g;
			Stream s;
			s.val = GenerateValues(d, spec.rows, cfg.seed);
			for (size_t i = 0; i < spec.rows; i++) {
				s.hash.push_back(PacHash(Value::Int(int64_t(i)), kBenchSalt));
				s.key.push_back(uint32_t(SplitMix64(cfg.seed ^ i) % g));
			}
			auto row = [&](const std::string &kernel, const std::string &tier, double ns) {
				out.push_back({kernel, tier, DistributionName(d), cfg.updates, g, ns});
			};
			for (auto &k : kernels) {
				if (k == "count") {
					row(k, "naive", Time<CountNaive>(s, g, cfg.updates, kCount));
					row(k, "predicated", Time<CountPredicated>(s, g, cfg.updates, kCount));
					row(k, "swar", Time<CountSwar>(s, g, cfg.updates, kCount));
				} else if (k == "sum") {
					row(k, "naive", Time<SumNaive>(s, g, cfg.updates, kValue));
					row(k, "predicated", Time<SumPredicated>(s, g, cfg.updates, kValue));
					row(k, "swar", Time<ExactSum>(s, g, cfg.updates, kValue));
					row(k, "approx", Time<ApproxSum>(s, g, cfg.updates, kValue));
					row(k, "buffered", Time<Buffered<ExactSum, int64_t>>(s, g, cfg.updates, kValue));
				} else if (k == "min") {
					row(k, "naive", Time<MinMaxNaive<int64_t, false>>(s, g, cfg.updates, kValue));
					row(k, "predicated", Time<MinMaxPredicated<int64_t, false>>(s, g, cfg.updates, kValue));
					row(k, "pruned", Time<MinMaxPruned<int64_t, false>>(s, g, cfg.updates, kValue));
				} else if (k == "max") {
					row(k, "naive", Time<MinMaxNaive<int64_t, true>>(s, g, cfg.updates, kValue));
					row(k, "predicated", Time<MinMaxPredicated<int64_t, true>>(s, g, cfg.updates, kValue));
					row(k, "pruned", Time<MinMaxPruned<int64_t, true>>(s, g, cfg.updates, kValue));
				} else {
					throw PacError(ErrorCode::SyntaxError, "unknown bench kernel " + k);
				}
			}
		}
	}
	return out;
}

std::string BenchCsv(const std::vector<BenchRow> &rows) {
	std::ostringstream out;
	out << "kernel,tier,distribution,rows,groups,ns_per_row\n";
	for (auto &r : rows) {
		out << r.kernel << ',' << r.tier << ',' << r.distribution << ',' << r.rows << ',' << r.groups << ','
		    << FormatDouble(r.ns_per_row) << '\n';
	}
	return out.str();
}

} // namespace pac
