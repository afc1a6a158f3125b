#ifndef JCJ_HASH_HPP_
#define JCJ_HASH_HPP_

#include <array>
#include <cstdint>
#include <string_view>

#include "jcj/bigint.hpp"
#include "jcj/bytes.hpp"

namespace jcj {

using Digest = std::array<uint8_t, 32>;

Digest sha256(const Bytes& data);
Bytes hmac_sha256(const Bytes& key, const Bytes& data);

inline Bytes digest_bytes(const Digest& d) { return Bytes(d.begin(), d.end()); }
std::string digest_hex(const Digest& d);
Digest digest_from_hex(std::string_view s);

// Deterministic random bit generator: SHA-256 in counter mode over a 32-byte
// key. All protocol randomness flows through labelled children of one master
// instance so that a (config, seed) pair reproduces byte-identical runs, and
// independently derived children can be consumed in any order.
class Drbg {
public:
    static Drbg from_seed(uint64_t seed);
    static Drbg from_key(const Bytes& key_material);

    // Independent child stream; children with distinct labels never collide.
    Drbg child(std::string_view label) const;
    Drbg child(std::string_view label, uint64_t index) const;

    void fill(uint8_t* out, size_t n);
    Bytes bytes(size_t n);
    uint64_t next_u64();

    // Uniform in [0, bound); draws bound_bits + 64 extra bits and reduces.
    Bigint below(const Bigint& bound);
    // Uniform in [1, bound).
    Bigint nonzero_below(const Bigint& bound);

private:
    explicit Drbg(const Digest& key) : key_(key) {}

    Digest key_{};
    uint64_t counter_ = 0;
    std::array<uint8_t, 32> block_{};
    size_t avail_ = 0;
};

}  // namespace jcj

#endif
