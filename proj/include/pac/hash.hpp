//
// Balanced per-query PU hashing: 64 world memberships per privacy unit.
//

#ifndef PAC_HASH_HPP
#define PAC_HASH_HPP

#include "pac/value.hpp"

#include <cstdint>
#include <vector>

namespace pac {

// splitmix64 output function (state advanced by the golden gamma first)
uint64_t SplitMix64(uint64_t x);
// murmur3 fmix64 avalanche round
uint64_t Fmix64(uint64_t x);

// NullKey on Null
uint64_t BaseHash(const Value &v);
// composite keys: XOR of component hashes
uint64_t BaseHash(const std::vector<Value> &key);

// popcount(result) == 32; identity when already balanced
uint64_t Balance64(uint64_t h);

uint64_t PacHash(uint64_t base, uint64_t salt);
inline uint64_t PacHash(const Value &key, uint64_t salt) {
	return PacHash(BaseHash(key), salt);
}
inline uint64_t PacHash(const std::vector<Value> &key, uint64_t salt) {
	return PacHash(BaseHash(key), salt);
}

} // namespace pac

#endif // PAC_HASH_HPP
