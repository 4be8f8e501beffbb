//
// Single-pass 64-world aggregate kernels. Every kernel keeps one logical slot per
// world; a row updates the slots whose bit is set in its PU hash.
//

#ifndef PAC_AGGREGATES_HPP
#define PAC_AGGREGATES_HPP

#include "pac/expr.hpp"
#include "pac/value.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <memory>
#include <stdexcept>
#include <type_traits>
#include <utility>

namespace pac {

using i128 = __int128;

// ============================================================================
// COUNT
// ============================================================================

// walks the set bits: one data-dependent branch per world
struct CountNaive {
	std::array<uint64_t, 64> c {};
	uint64_t mask = 0, updates = 0;

	void Update(uint64_t pu) {
		mask |= pu;
		updates++;
		while (pu) {
			c[std::countr_zero(pu)]++;
			pu &= pu - 1;
		}
	}
	void Combine(const CountNaive &o) {
		for (int j = 0; j < 64; j++) {
			c[j] += o.c[j];
		}
		mask |= o.mask;
		updates += o.updates;
	}
	void Counts(std::array<uint64_t, 64> &out) const {
		out = c;
	}
};

struct CountPredicated {
	std::array<uint64_t, 64> c {};
	uint64_t mask = 0, updates = 0;

	void Update(uint64_t pu) {
		mask |= pu;
		updates++;
		for (int j = 0; j < 64; j++) {
			c[j] += (pu >> j) & 1ULL;
		}
	}
	void Combine(const CountPredicated &o) {
		for (int j = 0; j < 64; j++) {
			c[j] += o.c[j];
		}
		mask |= o.mask;
		updates += o.updates;
	}
	void Counts(std::array<uint64_t, 64> &out) const {
		out = c;
	}
};

// 8 words of 8 byte-lanes; hash bit i lives in word i%8, byte i/8.
// Lanes are folded into 64-bit totals every 255 updates, before a byte can wrap.
struct CountSwar {
	static constexpr uint64_t kLow = 0x0101010101010101ULL;
	uint64_t lanes[8] = {};
	std::array<uint64_t, 64> totals {};
	uint32_t since_flush = 0;
	uint64_t mask = 0, updates = 0;

	void Update(uint64_t pu) {
		mask |= pu;
		updates++;
		for (int w = 0; w < 8; w++) {
			lanes[w] += (pu >> w) & kLow;
		}
		if (++since_flush == 255) {
			Flush();
		}
	}
	void Flush() {
		for (int w = 0; w < 8; w++) {
			for (int b = 0; b < 8; b++) {
				totals[w + 8 * b] += (lanes[w] >> (8 * b)) & 0xFF;
			}
			lanes[w] = 0;
		}
		since_flush = 0;
	}
	void Counts(std::array<uint64_t, 64> &out) const {
		for (int i = 0; i < 64; i++) {
			out[i] = totals[i] + ((lanes[i % 8] >> (8 * (i / 8))) & 0xFF);
		}
	}
	void Combine(const CountSwar &o) {
		std::array<uint64_t, 64> oc;
		o.Counts(oc);
		for (int j = 0; j < 64; j++) {
			totals[j] += oc[j];
		}
		mask |= o.mask;
		updates += o.updates;
	}
};

// ============================================================================
// INTEGER SUM (exact)
// ============================================================================

struct SumNaive {
	std::array<i128, 64> s {};
	uint64_t mask = 0, updates = 0;

	void Update(uint64_t pu, int64_t v) {
		mask |= pu;
		updates++;
		while (pu) {
			s[std::countr_zero(pu)] += v;
			pu &= pu - 1;
		}
	}
	void Combine(const SumNaive &o) {
		for (int j = 0; j < 64; j++) {
			s[j] += o.s[j];
		}
		mask |= o.mask;
		updates += o.updates;
	}
	void Sums(std::array<i128, 64> &out) const {
		out = s;
	}
};

struct SumPredicated {
	std::array<i128, 64> s {};
	uint64_t mask = 0, updates = 0;

	void Update(uint64_t pu, int64_t v) {
		mask |= pu;
		updates++;
		for (int j = 0; j < 64; j++) {
			s[j] += v & -int64_t((pu >> j) & 1ULL);
		}
	}
	void Combine(const SumPredicated &o) {
		for (int j = 0; j < 64; j++) {
			s[j] += o.s[j];
		}
		mask |= o.mask;
		updates += o.updates;
	}
	void Sums(std::array<i128, 64> &out) const {
		out = s;
	}
};

// Five cascading levels of 8/16/32/64/128-bit accumulators. Levels 0-2 are
// SWAR-packed with lane-wise modular adds; a per-level running bound on sum|v|
// forces a flush into the next level before any lane could leave its range.
class ExactSum {
public:
	uint64_t mask = 0, updates = 0;

	void Update(uint64_t pu, int64_t v) {
		mask |= pu;
		updates++;
		uint64_t a = v < 0 ? uint64_t(0) - uint64_t(v) : uint64_t(v);
		if (a < (1ULL << 4)) {
			Reserve(0, a);
			AddSwar<8>(l8_, pu, v);
		} else if (a < (1ULL << 10)) {
			Reserve(1, a);
			AddSwar<16>(l16_, pu, v);
		} else if (a < (1ULL << 25)) {
			Reserve(2, a);
			AddSwar<32>(l32_, pu, v);
		} else if (a < (1ULL << 56)) {
			Reserve(3, a);
			for (int j = 0; j < 64; j++) {
				l64_[j] += v & -int64_t((pu >> j) & 1ULL);
			}
		} else {
			for (int j = 0; j < 64; j++) {
				l128_[j] += v & -int64_t((pu >> j) & 1ULL);
			}
		}
	}
	void Sums(std::array<i128, 64> &out) const {
		for (int i = 0; i < 64; i++) {
			out[i] = l128_[i] + l64_[i] + GetSwar<32>(l32_, i) + GetSwar<16>(l16_, i) + GetSwar<8>(l8_, i);
		}
	}
	void Combine(const ExactSum &o) {
		std::array<i128, 64> os;
		o.Sums(os);
		for (int j = 0; j < 64; j++) {
			l128_[j] += os[j];
		}
		mask |= o.mask;
		updates += o.updates;
	}
	// number of level flushes so far, for tests
	uint64_t flushes() const {
		return flushes_;
	}

private:
	static constexpr uint64_t kCap[4] = {127ULL, 32767ULL, 2147483647ULL, 9223372036854775807ULL};

	template <int B>
	static constexpr uint64_t LowBits() {
		uint64_t m = 0;
		for (int k = 0; k < 64; k += B) {
			m |= 1ULL << k;
		}
		return m;
	}
	template <int B>
	static void AddSwar(uint64_t *words, uint64_t pu, int64_t v) {
		constexpr int W = B;                   // words per level == lane width
		constexpr uint64_t low = LowBits<B>(); // first bit of every lane
		constexpr uint64_t high = low << (B - 1);
		constexpr uint64_t lane_mask = B == 64 ? ~0ULL : ((1ULL << B) - 1);
		uint64_t u = uint64_t(v) & lane_mask;
		for (int w = 0; w < W; w++) {
			uint64_t expanded = ((pu >> w) & low) * u;
			uint64_t x = words[w];
			words[w] = ((x & ~high) + (expanded & ~high)) ^ ((x ^ expanded) & high);
		}
	}
	template <int B>
	static int64_t GetSwar(const uint64_t *words, int i) {
		constexpr int W = B;
		uint64_t lane = (words[i % W] >> (B * (i / W))) & ((1ULL << B) - 1);
		// sign-extend the B-bit lane
		return int64_t(lane << (64 - B)) >> (64 - B);
	}

	void Reserve(int level, uint64_t a) {
		if (bound_[level] + a > kCap[level]) {
			Flush(level);
		}
		bound_[level] += a;
	}
	void Flush(int level) {
		flushes_++;
		if (level == 3) {
			for (int j = 0; j < 64; j++) {
				l128_[j] += l64_[j];
				l64_[j] = 0;
			}
			bound_[3] = 0;
			return;
		}
		if (bound_[level + 1] + bound_[level] > kCap[level + 1]) {
			Flush(level + 1);
		}
		for (int i = 0; i < 64; i++) {
			int64_t x = level == 0 ? GetSwar<8>(l8_, i) : level == 1 ? GetSwar<16>(l16_, i) : GetSwar<32>(l32_, i);
			AddWorld(level + 1, i, x);
		}
		bound_[level + 1] += bound_[level];
		bound_[level] = 0;
		if (level == 0) {
			std::memset(l8_, 0, sizeof(l8_));
		} else if (level == 1) {
			std::memset(l16_, 0, sizeof(l16_));
		} else {
			std::memset(l32_, 0, sizeof(l32_));
		}
	}
	void AddWorld(int level, int i, int64_t x) {
		if (level == 3) {
			l64_[i] += x;
			return;
		}
		uint64_t pu = 1ULL << i;
		if (level == 1) {
			AddSwar<16>(l16_, pu, x);
		} else {
			AddSwar<32>(l32_, pu, x);
		}
	}

	uint64_t l8_[8] = {};
	uint64_t l16_[16] = {};
	uint64_t l32_[32] = {};
	int64_t l64_[64] = {};
	i128 l128_[64] = {};
	uint64_t bound_[4] = {};
	uint64_t flushes_ = 0;
};

// ============================================================================
// INTEGER SUM (approximate, 25 levels of 16-bit counters)
// ============================================================================

// Level k counts in units of 2^(4k). A value is routed to the level where its
// magnitude has 8..12 significant bits and added rounded to the nearest unit.
// When a counter could exceed 16 bits, the upper 12 bits of every counter in
// that level move one level up; the low 4 bits stay (so a cascade is lossless).
class ApproxSide {
public:
	static constexpr int kLevels = 25;

	ApproxSide() {
		std::memset(&store_, 0, sizeof(store_));
	}
	~ApproxSide() {
		if (inline_level_ == kPointerMode) {
			for (auto *p : store_.ptrs) {
				delete[] p;
			}
		}
	}
	ApproxSide(const ApproxSide &) = delete;
	ApproxSide &operator=(const ApproxSide &) = delete;

	static int LevelOf(uint64_t a) {
		int msb = 63 - std::countl_zero(a | 1);
		int k = msb >= 8 ? (msb - 8) / 4 : 0;
		return k > kLevels - 1 ? kLevels - 1 : k;
	}
	static uint64_t Routed(uint64_t a, int k) {
		if (k == 0) {
			return a;
		}
		unsigned __int128 r = ((unsigned __int128)a + ((unsigned __int128)1 << (4 * k - 1))) >> (4 * k);
		return uint64_t(r);
	}

	void Add(uint64_t pu, uint64_t a) {
		if (a == 0) {
			return;
		}
		int k = LevelOf(a);
		uint64_t r = Routed(a, k);
		if (bound_[k] + r > 0xFFFF) {
			Cascade(k);
		}
		bound_[k] += uint32_t(r);
		uint16_t *ctr = Level(k);
		uint16_t add = uint16_t(r);
		for (int j = 0; j < 64; j++) {
			ctr[j] += add * uint16_t((pu >> j) & 1ULL);
		}
	}
	// reconstructed per-world totals
	void Totals(std::array<long double, 64> &out) const {
		out.fill(0);
		for (int k = 0; k < kLevels; k++) {
			const uint16_t *ctr = Peek(k);
			if (!ctr) {
				continue;
			}
			long double unit = std::ldexp((long double)1, 4 * k);
			for (int j = 0; j < 64; j++) {
				out[j] += ctr[j] * unit;
			}
		}
	}
	void ExactTotals(std::array<i128, 64> &out) const {
		out.fill(0);
		for (int k = 0; k < kLevels && 4 * k < 120; k++) {
			const uint16_t *ctr = Peek(k);
			if (!ctr) {
				continue;
			}
			for (int j = 0; j < 64; j++) {
				out[j] += i128(ctr[j]) << (4 * k);
			}
		}
	}
	void AddLevelCounts(int k, const uint16_t *src, uint32_t src_bound) {
		// used by combine: add another side's level into ours with cascading
		if (bound_[k] + src_bound > 0xFFFF) {
			Cascade(k);
			if (bound_[k] + src_bound > 0xFFFF) {
				// still too large: push the incoming upper part one level up first
				uint16_t hi[64], lo[64];
				for (int j = 0; j < 64; j++) {
					hi[j] = uint16_t(src[j] >> 4);
					lo[j] = uint16_t(src[j] & 15);
				}
				AddLevelCounts(k + 1, hi, src_bound >> 4);
				AddLevelCounts(k, lo, 15);
				return;
			}
		}
		uint16_t *ctr = Level(k);
		for (int j = 0; j < 64; j++) {
			ctr[j] += src[j];
		}
		bound_[k] += src_bound;
	}
	void Combine(const ApproxSide &o) {
		for (int k = 0; k < kLevels; k++) {
			const uint16_t *ctr = o.Peek(k);
			if (ctr) {
				AddLevelCounts(k, ctr, o.bound_[k]);
			}
		}
	}
	int allocated_levels() const {
		int n = 0;
		for (int k = 0; k < kLevels; k++) {
			n += Peek(k) != nullptr;
		}
		return n;
	}
	bool uses_inline_storage() const {
		return inline_level_ >= 0;
	}
	uint64_t cascades() const {
		return cascades_;
	}
	// forces the cascade of level k (tests)
	void Cascade(int k) {
		if (k + 1 >= kLevels) {
			throw std::overflow_error("approximate sum exceeded its top level");
		}
		cascades_++;
		uint32_t up = bound_[k] >> 4;
		if (bound_[k + 1] + up > 0xFFFF) {
			Cascade(k + 1);
		}
		uint16_t *src = Level(k);
		uint16_t *dst = Level(k + 1);
		src = Level(k); // Level(k+1) may have moved inline storage to the heap
		for (int j = 0; j < 64; j++) {
			dst[j] += uint16_t(src[j] >> 4);
			src[j] &= 15;
		}
		bound_[k + 1] += up;
		bound_[k] = bound_[k] < 15 ? bound_[k] : 15;
	}

private:
	static constexpr int8_t kEmpty = -1;
	static constexpr int8_t kPointerMode = -2;

	const uint16_t *Peek(int k) const {
		if (inline_level_ == kEmpty) {
			return nullptr;
		}
		if (inline_level_ >= 0) {
			return inline_level_ == k ? store_.inline_ctr : nullptr;
		}
		return store_.ptrs[k];
	}
	uint16_t *Level(int k) {
		if (inline_level_ == kEmpty) {
			inline_level_ = int8_t(k);
			return store_.inline_ctr;
		}
		if (inline_level_ >= 0) {
			if (inline_level_ == k) {
				return store_.inline_ctr;
			}
			// second level: move the inline counters out and switch to pointer mode
			auto *moved = new uint16_t[64];
			std::memcpy(moved, store_.inline_ctr, sizeof(uint16_t) * 64);
			int old = inline_level_;
			std::memset(&store_, 0, sizeof(store_));
			store_.ptrs[old] = moved;
			inline_level_ = kPointerMode;
		}
		if (!store_.ptrs[k]) {
			store_.ptrs[k] = new uint16_t[64]();
		}
		return store_.ptrs[k];
	}

	union Store {
		uint16_t *ptrs[kLevels];
		uint16_t inline_ctr[64];
	} store_;
	int8_t inline_level_ = kEmpty;
	uint32_t bound_[kLevels] = {};
	uint64_t cascades_ = 0;
};

// two-sided: negatives accumulate negated in their own structure
class ApproxSum {
public:
	uint64_t mask = 0, updates = 0;

	void Update(uint64_t pu, int64_t v) {
		mask |= pu;
		updates++;
		if (v >= 0) {
			pos_.Add(pu, uint64_t(v));
		} else {
			if (!neg_) {
				neg_ = std::make_unique<ApproxSide>();
			}
			neg_->Add(pu, uint64_t(0) - uint64_t(v));
		}
	}
	void Combine(const ApproxSum &o) {
		pos_.Combine(o.pos_);
		if (o.neg_) {
			if (!neg_) {
				neg_ = std::make_unique<ApproxSide>();
			}
			neg_->Combine(*o.neg_);
		}
		mask |= o.mask;
		updates += o.updates;
	}
	void Slots(std::array<double, 64> &out) const {
		std::array<long double, 64> p, n;
		pos_.Totals(p);
		if (neg_) {
			neg_->Totals(n);
		} else {
			n.fill(0);
		}
		for (int j = 0; j < 64; j++) {
			out[j] = double(p[j] - n[j]);
		}
	}
	const ApproxSide &positive() const {
		return pos_;
	}
	ApproxSide &positive() {
		return pos_;
	}
	const ApproxSide *negative() const {
		return neg_.get();
	}

private:
	ApproxSide pos_;
	std::unique_ptr<ApproxSide> neg_;
};

// single-sided baseline: signed 16-bit counters, values routed by an arithmetic
// shift (floor); only used to reproduce the cancellation contrast
class ApproxSumSingleSided {
public:
	uint64_t mask = 0, updates = 0;

	void Update(uint64_t pu, int64_t v) {
		mask |= pu;
		updates++;
		if (v == 0) {
			return;
		}
		uint64_t a = v < 0 ? uint64_t(0) - uint64_t(v) : uint64_t(v);
		int k = ApproxSide::LevelOf(a);
		int64_t r = v >> (4 * k);
		int64_t next = int64_t(bound_[k]) + (r < 0 ? -r : r);
		if (next > 0x7FFF) {
			Cascade(k);
		}
		bound_[k] += uint32_t(r < 0 ? -r : r);
		for (int j = 0; j < 64; j++) {
			c_[k][j] += int16_t(r) * int16_t((pu >> j) & 1ULL);
		}
	}
	void Slots(std::array<double, 64> &out) const {
		for (int j = 0; j < 64; j++) {
			long double s = 0;
			for (int k = 0; k < ApproxSide::kLevels; k++) {
				s += c_[k][j] * std::ldexp((long double)1, 4 * k);
			}
			out[j] = double(s);
		}
	}

private:
	void Cascade(int k) {
		uint32_t up = bound_[k] >> 4;
		if (int64_t(bound_[k + 1]) + up > 0x7FFF) {
			Cascade(k + 1);
		}
		for (int j = 0; j < 64; j++) {
			// arithmetic shift keeps the floor bias of the baseline
			c_[k + 1][j] += int16_t(c_[k][j] >> 4);
			c_[k][j] = int16_t(c_[k][j] - ((c_[k][j] >> 4) << 4));
		}
		bound_[k + 1] += up;
		bound_[k] = 15;
	}
	int16_t c_[ApproxSide::kLevels][64] = {};
	uint32_t bound_[ApproxSide::kLevels] = {};
};

// ============================================================================
// FLOAT SUM
// ============================================================================

struct FloatSumNaive {
	std::array<double, 64> s {};
	uint64_t mask = 0, updates = 0;

	void Update(uint64_t pu, double v) {
		mask |= pu;
		updates++;
		while (pu) {
			s[std::countr_zero(pu)] += v;
			pu &= pu - 1;
		}
	}
	void Combine(const FloatSumNaive &o) {
		for (int j = 0; j < 64; j++) {
			s[j] += o.s[j];
		}
		mask |= o.mask;
		updates += o.updates;
	}
	void Slots(std::array<double, 64> &out) const {
		out = s;
	}
};

struct FloatSumPredicated {
	std::array<double, 64> s {};
	uint64_t mask = 0, updates = 0;

	void Update(uint64_t pu, double v) {
		mask |= pu;
		updates++;
		for (int j = 0; j < 64; j++) {
			s[j] += ((pu >> j) & 1ULL) ? v : 0.0;
		}
	}
	void Combine(const FloatSumPredicated &o) {
		for (int j = 0; j < 64; j++) {
			s[j] += o.s[j];
		}
		mask |= o.mask;
		updates += o.updates;
	}
	void Slots(std::array<double, 64> &out) const {
		out = s;
	}
};

// ============================================================================
// MIN / MAX
// ============================================================================

template <class T, bool IS_MAX>
struct Extremum {
	static constexpr T Neutral() {
		if constexpr (std::numeric_limits<T>::has_infinity) {
			return IS_MAX ? -std::numeric_limits<T>::infinity() : std::numeric_limits<T>::infinity();
		} else {
			return IS_MAX ? std::numeric_limits<T>::lowest() : std::numeric_limits<T>::max();
		}
	}
	static bool Beats(T v, T cur) {
		return IS_MAX ? v > cur : v < cur;
	}
};

template <class T, bool IS_MAX>
struct MinMaxNaive {
	using X = Extremum<T, IS_MAX>;
	std::array<T, 64> e;
	uint64_t mask = 0, updates = 0;
	MinMaxNaive() {
		e.fill(X::Neutral());
	}
	void Update(uint64_t pu, T v) {
		mask |= pu;
		updates++;
		while (pu) {
			int j = std::countr_zero(pu);
			if (X::Beats(v, e[j])) {
				e[j] = v;
			}
			pu &= pu - 1;
		}
	}
	void Combine(const MinMaxNaive &o) {
		for (int j = 0; j < 64; j++) {
			if (X::Beats(o.e[j], e[j])) {
				e[j] = o.e[j];
			}
		}
		mask |= o.mask;
		updates += o.updates;
	}
	void Slots(std::array<T, 64> &out) const {
		out = e;
	}
};

template <class T>
inline T SelectBits(T keep_if_ones, uint64_t keep, T take) {
	if constexpr (std::is_same_v<T, double>) {
		uint64_t a, b;
		std::memcpy(&a, &keep_if_ones, 8);
		std::memcpy(&b, &take, 8);
		uint64_t r = (a & keep) | (b & ~keep);
		double out;
		std::memcpy(&out, &r, 8);
		return out;
	} else {
		return T((uint64_t(keep_if_ones) & keep) | (uint64_t(take) & ~keep));
	}
}

// branch-free: keep-mask = (condition - 1)
template <class T, bool IS_MAX>
struct MinMaxPredicated {
	using X = Extremum<T, IS_MAX>;
	std::array<T, 64> e;
	uint64_t mask = 0, updates = 0;
	MinMaxPredicated() {
		e.fill(X::Neutral());
	}
	void Update(uint64_t pu, T v) {
		mask |= pu;
		updates++;
		for (int j = 0; j < 64; j++) {
			uint64_t take = ((pu >> j) & 1ULL) & uint64_t(X::Beats(v, e[j]));
			e[j] = SelectBits(e[j], take - 1, v);
		}
	}
	void Combine(const MinMaxPredicated &o) {
		for (int j = 0; j < 64; j++) {
			uint64_t take = uint64_t(X::Beats(o.e[j], e[j]));
			e[j] = SelectBits(e[j], take - 1, o.e[j]);
		}
		mask |= o.mask;
		updates += o.updates;
	}
	void Slots(std::array<T, 64> &out) const {
		out = e;
	}
};

// predicated kernel plus a global bound g (the weakest slot, refreshed every
// 2048 updates); values that cannot beat g skip the slot loop entirely
template <class T, bool IS_MAX>
struct MinMaxPruned {
	using X = Extremum<T, IS_MAX>;
	static constexpr uint32_t kRefresh = 2048;
	MinMaxPredicated<T, IS_MAX> inner;
	T g = X::Neutral();
	uint32_t since_refresh = 0;
	uint64_t mask = 0, updates = 0, pruned = 0;

	void Update(uint64_t pu, T v) {
		mask |= pu;
		updates++;
		if (++since_refresh == kRefresh) {
			Refresh();
		}
		if (!X::Beats(v, g)) {
			pruned++;
			return;
		}
		inner.Update(pu, v);
	}
	void Refresh() {
		since_refresh = 0;
		T w = inner.e[0];
		for (int j = 1; j < 64; j++) {
			w = X::Beats(w, inner.e[j]) ? inner.e[j] : w;
		}
		g = w;
	}
	void Combine(const MinMaxPruned &o) {
		inner.Combine(o.inner);
		mask |= o.mask;
		updates += o.updates;
		Refresh();
	}
	void Slots(std::array<T, 64> &out) const {
		inner.Slots(out);
	}
};

// ============================================================================
// BUFFERING
// ============================================================================

// holds the first three (value, hash) pairs inline; the inner state is only
// allocated on the fourth update and then replays the buffer in order
template <class K, class T>
class Buffered {
public:
	uint64_t mask = 0, updates = 0;

	Buffered() = default;
	Buffered(const Buffered &o) : mask(o.mask), updates(o.updates), buf_(o.buf_), n_(o.n_) {
		if (o.inner_) {
			inner_ = std::make_unique<K>(*o.inner_);
		}
	}

	void Update(uint64_t pu, T v) {
		mask |= pu;
		updates++;
		if (inner_) {
			inner_->Update(pu, v);
			return;
		}
		if (n_ < 3) {
			buf_[n_++] = {v, pu};
			return;
		}
		Materialize();
		inner_->Update(pu, v);
	}
	void Combine(const Buffered &o) {
		if (o.inner_) {
			Materialize();
			inner_->Combine(*o.inner_);
		} else {
			for (int i = 0; i < o.n_; i++) {
				if (inner_) {
					inner_->Update(o.buf_[i].second, o.buf_[i].first);
				} else if (n_ < 3) {
					buf_[n_++] = o.buf_[i];
				} else {
					Materialize();
					inner_->Update(o.buf_[i].second, o.buf_[i].first);
				}
			}
		}
		mask |= o.mask;
		updates += o.updates;
	}
	// state with everything applied (temporary when still buffered)
	template <class F>
	void WithInner(F &&f) const {
		if (inner_) {
			f(*inner_);
			return;
		}
		K tmp;
		for (int i = 0; i < n_; i++) {
			tmp.Update(buf_[i].second, buf_[i].first);
		}
		f(tmp);
	}
	bool materialized() const {
		return inner_ != nullptr;
	}
	int buffered() const {
		return n_;
	}

private:
	void Materialize() {
		if (inner_) {
			return;
		}
		inner_ = std::make_unique<K>();
		for (int i = 0; i < n_; i++) {
			inner_->Update(buf_[i].second, buf_[i].first);
		}
		n_ = 0;
	}
	std::array<std::pair<T, uint64_t>, 3> buf_ {};
	uint8_t n_ = 0;
	std::unique_ptr<K> inner_;
};

// ============================================================================
// type-erased states for the executor
// ============================================================================

enum class AggTier : uint8_t { Naive, Predicated, Swar };
const char *AggTierName(AggTier t);

struct AggOptions {
	AggTier tier = AggTier::Swar;
	bool approx = false;
	bool buffered = true;
};

class AggState {
public:
	virtual ~AggState() = default;
	// v is non-null; ignored for count
	virtual void Update(uint64_t pu, const Value &v) = 0;
	// other must come from the same factory arguments
	virtual void Combine(const AggState &other) = 0;
	// per-world raw values; unset slots are zero. Runs the diversity check.
	virtual WorldVector FinalizeRaw() const = 0;
	virtual uint64_t mask() const = 0;
	virtual uint64_t update_count() const = 0;
};

// input: type of the aggregated expression (ignored for count/count_star)
std::unique_ptr<AggState> MakeAggState(AggKind kind, Type input, const AggOptions &opts);
// Fused form: noise the raw vector with the per-kind scale
double AggScale(AggKind kind);

} // namespace pac

#endif // PAC_AGGREGATES_HPP
