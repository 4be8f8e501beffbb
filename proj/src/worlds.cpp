#include "pac/worlds.hpp"

#include "pac/errors.hpp"

#include <bit>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

namespace pac {

NoiseSession::NoiseSession(uint64_t seed, double budget, bool noise_enabled)
    : rng_(seed), budget_(budget), noise_enabled_(noise_enabled) {
	if (!(budget > 0)) {
		throw PacError(ErrorCode::DataError, "MI budget must be positive");
	}
	salt_ = rng_();
	j_star_ = int(rng_() >> 58);
	posterior_.fill(1.0 / 64.0);
}

double NoiseSession::NextUniform() {
	return (double(rng_() >> 11) + 0.5) * 0x1.0p-53;
}

bool NoiseSession::Filter(uint64_t bits) {
	return int(rng_() >> 58) < std::popcount(bits);
}

Value NoiseSession::Noised(const WorldVector &v, double scale) {
	if (int(rng_() >> 58) >= std::popcount(v.mask)) {
		return Value::Null();
	}
	std::array<double, 64> y;
	for (int j = 0; j < 64; j++) {
		y[j] = scale * v.At(j);
	}
	cells_released_++;

	// all candidate outputs equal under P -> zero variance, nothing to learn
	bool constant = true;
	double first = 0;
	bool seen = false;
	for (int j = 0; j < 64; j++) {
		if (posterior_[j] <= 0) {
			continue;
		}
		if (!seen) {
			first = y[j];
			seen = true;
		} else if (y[j] != first) {
			constant = false;
			break;
		}
	}
	if (constant || !noise_enabled_) {
		return Value::Float(y[j_star_]);
	}
	double mean = 0;
	for (int j = 0; j < 64; j++) {
		mean += posterior_[j] * y[j];
	}
	double s2 = 0;
	for (int j = 0; j < 64; j++) {
		double d = y[j] - mean;
		s2 += posterior_[j] * d * d;
	}
	if (!(s2 > 0)) {
		return Value::Float(y[j_star_]);
	}
	double delta = s2 / (2.0 * budget_);
	static const boost::math::normal_distribution<double> std_normal;
	double z = boost::math::quantile(std_normal, NextUniform());
	double released = y[j_star_] + std::sqrt(delta) * z;

	// Bayesian update in log space, then renormalize
	std::array<double, 64> w;
	double wmax = -INFINITY;
	for (int j = 0; j < 64; j++) {
		double d = released - y[j];
		w[j] = posterior_[j] > 0 ? std::log(posterior_[j]) - d * d / (2.0 * delta) : -INFINITY;
		wmax = std::max(wmax, w[j]);
	}
	double total = 0;
	for (int j = 0; j < 64; j++) {
		w[j] = std::exp(w[j] - wmax);
		total += w[j];
	}
	for (int j = 0; j < 64; j++) {
		posterior_[j] = w[j] / total;
	}
	return Value::Float(released);
}

WorldVector VectorLift(const ExprPtr &bound, const Relation &rel, size_t row, EvalHooks *hooks) {
	RowCtx ctx;
	ctx.rel = &rel;
	ctx.row = row;
	ctx.hooks = hooks;
	return EvalLifted(*bound, ctx);
}

void DiversityCheck(uint64_t update_count, uint64_t mask) {
	if (update_count >= kDiversityMinUpdates && std::popcount(mask) <= kDiversityMaxPopcount) {
		throw PacError(ErrorCode::SuspiciousGroup,
		               "suspicious group: " + std::to_string(update_count) + " updates reached only " +
		                   std::to_string(std::popcount(mask)) + " of 64 worlds (single privacy unit?)");
	}
}

double BinaryKL(double a, double b) {
	auto term = [](double x, double y) { return x > 0 ? x * std::log(x / y) : 0.0; };
	return term(a, b) + term(1 - a, 1 - b);
}

double MiaBound(double prior, double total_mi) {
	if (!(prior > 0 && prior < 1) || total_mi < 0) {
		throw PacError(ErrorCode::DataError, "mia-bound needs 0 < prior < 1 and mi >= 0");
	}
	if (total_mi == 0) {
		return prior;
	}
	if (total_mi >= -std::log(prior)) {
		return 1.0;
	}
	double lo = prior, hi = 1.0;
	while (hi - lo > 1e-12) {
		double mid = 0.5 * (lo + hi);
		if (BinaryKL(mid, prior) <= total_mi) {
			lo = mid;
		} else {
			hi = mid;
		}
	}
	return lo;
}

} // namespace pac
