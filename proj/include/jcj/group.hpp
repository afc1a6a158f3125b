#ifndef JCJ_GROUP_HPP_
#define JCJ_GROUP_HPP_

#include <cstdint>
#include <string_view>

#include "jcj/bigint.hpp"
#include "jcj/hash.hpp"

namespace jcj {

// Safe-prime subgroup parameters: p = 2q+1 with p, q prime, and two
// generators g1, g2 of the order-q subgroup. g2 is derived by hashing to the
// group from a public seed so that no party knows log_g1(g2).
struct GroupParams {
    Bigint p;
    Bigint q;
    Bigint g1;
    Bigint g2;

    bool operator==(const GroupParams&) const = default;
};

class GroupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Deterministic per (bit_length, seed). Bit lengths with an embedded standard
// group (256/512/1024/2048) reuse it; smaller sizes run a seeded safe-prime
// search. Throws GroupError if no safe prime is found within bounded attempts.
GroupParams generate_params(unsigned bit_length, const Bytes& seed);

// Full invariant check: primality of p and q, p = 2q+1, generator orders,
// g1 != g2, neither trivial.
bool validate_params(const GroupParams& params, std::string* why = nullptr);

// True iff x is in the order-q subgroup (x^q = 1, x != 0).
bool in_subgroup(const GroupParams& params, const Bigint& x);

// Deterministic hash-to-subgroup; distinct (domain, input) pairs map to
// independent elements. Never returns the identity.
Bigint hash_to_group(const GroupParams& params, std::string_view domain, const Bytes& input);

// Uniform subgroup element from a DRBG stream (g1^e for uniform e).
Bigint random_element(const GroupParams& params, Drbg& rng);

// Challenge scalar: SHA-256 of the input bytes reduced mod q.
Bigint hash_to_scalar(const Bigint& q, const Bytes& input);

}  // namespace jcj

#endif
