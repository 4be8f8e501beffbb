//
// Privacy layer over 64-world vectors: noising with a Bayesian posterior over the
// secret world, probabilistic filtering, hash selection and the MIA bound.
//

#ifndef PAC_WORLDS_HPP
#define PAC_WORLDS_HPP

#include "pac/expr.hpp"
#include "pac/value.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace pac {

constexpr double kDefaultBudget = 1.0 / 128.0;

class NoiseSession {
public:
	// draws the query salt, then j*, from the seeded stream
	NoiseSession(uint64_t seed, double budget = kDefaultBudget, bool noise_enabled = true);

	uint64_t salt() const {
		return salt_;
	}
	int j_star() const {
		return j_star_;
	}
	double budget() const {
		return budget_;
	}
	bool noise_enabled() const {
		return noise_enabled_;
	}
	const std::array<double, 64> &posterior() const {
		return posterior_;
	}
	uint64_t cells_released() const {
		return cells_released_;
	}
	// MI spent so far under linear composition
	double spent() const {
		return budget_ * double(cells_released_);
	}

	// Float64 release or Null; always consumes the Null draw first
	Value Noised(const WorldVector &v, double scale);
	// true with probability popcount(bits)/64, one draw
	bool Filter(uint64_t bits);

	uint64_t NextU64() {
		return rng_();
	}
	// uniform in the open interval (0, 1)
	double NextUniform();

private:
	std::mt19937_64 rng_;
	uint64_t salt_;
	int j_star_;
	double budget_;
	bool noise_enabled_;
	std::array<double, 64> posterior_;
	uint64_t cells_released_ = 0;
};

inline uint64_t PacSelect(uint64_t pu, uint64_t bits) {
	return pu & bits;
}

// pointwise evaluation of a bound expression over one row whose lifted columns hold vectors
WorldVector VectorLift(const ExprPtr &bound, const Relation &rel, size_t row, EvalHooks *hooks = nullptr);

constexpr uint64_t kDiversityMinUpdates = 64;
constexpr int kDiversityMaxPopcount = 34;
// throws SuspiciousGroup
void DiversityCheck(uint64_t update_count, uint64_t mask);

double BinaryKL(double a, double b);
// largest p in [prior, 1] with KL(p || prior) <= total_mi
double MiaBound(double prior, double total_mi);

} // namespace pac

#endif // PAC_WORLDS_HPP
