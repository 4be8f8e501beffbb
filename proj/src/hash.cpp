#include "pac/hash.hpp"

#include "pac/errors.hpp"

#include <bit>
#include <cstring>

namespace pac {

uint64_t SplitMix64(uint64_t x) {
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

uint64_t Fmix64(uint64_t x) {
	x ^= x >> 33;
	x *= 0xff51afd7ed558ccdULL;
	x ^= x >> 33;
	x *= 0xc4ceb9fe1a85ec53ULL;
	x ^= x >> 33;
	return x;
}

namespace {

uint64_t Fnv1a(const std::string &s) {
	uint64_t h = 0xcbf29ce484222325ULL;
	for (unsigned char c : s) {
		h ^= c;
		h *= 0x100000001b3ULL;
	}
	return h;
}

} // namespace

uint64_t BaseHash(const Value &v) {
	switch (v.type()) {
	case Type::Null:
		throw PacError(ErrorCode::NullKey, "NULL privacy-unit key");
	case Type::Int64:
		return SplitMix64(static_cast<uint64_t>(v.as_int()));
	case Type::Float64: {
		double d = v.as_float();
		uint64_t bits;
		std::memcpy(&bits, &d, sizeof(bits));
		return SplitMix64(bits ^ 0x7ff0000000000001ULL);
	}
	case Type::Bool:
		return SplitMix64(v.as_bool() ? 0xb001ULL : 0xb000ULL);
	case Type::Text:
		return SplitMix64(Fnv1a(v.as_text()));
	case Type::Date:
		return SplitMix64(0xda7e000000000000ULL ^ static_cast<uint32_t>(v.as_date()));
	case Type::Hash:
		return SplitMix64(v.as_hash());
	case Type::Vector:
		break;
	}
	throw PacError(ErrorCode::TypeMismatch, "cannot hash a world vector");
}

uint64_t BaseHash(const std::vector<Value> &key) {
	uint64_t h = 0;
	for (auto &v : key) {
		h ^= BaseHash(v);
	}
	return h;
}

uint64_t Balance64(uint64_t h) {
	int d = std::popcount(h) - 32;
	if (d == 0) {
		return h;
	}
	// flip |d| randomly chosen bits of the majority polarity; the walk is seeded by h
	bool clear_ones = d > 0;
	int need = d > 0 ? d : -d;
	uint64_t state = h;
	uint64_t out = h;
	while (need > 0) {
		state += 0x9e3779b97f4a7c15ULL;
		uint64_t r = SplitMix64(state);
		for (int k = 0; k < 10 && need > 0; k++, r >>= 6) {
			uint64_t bit = 1ULL << (r & 63);
			bool set = (out & bit) != 0;
			if (set == clear_ones) {
				out ^= bit;
				need--;
			}
		}
	}
	return out;
}

uint64_t PacHash(uint64_t base, uint64_t salt) {
	return Balance64(Fmix64(base ^ salt));
}

} // namespace pac
