#ifndef JCJ_BIGINT_HPP_
#define JCJ_BIGINT_HPP_

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "jcj/bytes.hpp"

namespace jcj {

using Bigint = mpz_class;

// Modular exponentiation b^e mod m. Every call is reported to the
// exponentiation counter installed for the current thread (see below),
// which is how OpCounters.exponentiation_count is collected.
Bigint modpow(const Bigint& base, const Bigint& exp, const Bigint& mod);

// Modular inverse; throws std::domain_error if gcd(a, mod) != 1.
Bigint modinv(const Bigint& a, const Bigint& mod);

Bigint mulmod(const Bigint& a, const Bigint& b, const Bigint& mod);

// Canonical scalar/element encoding: 4-byte big-endian length followed by
// the minimal-length big-endian magnitude (zero encodes as length 0).
Bytes int_to_bytes(const Bigint& x);          // magnitude only, minimal length
Bigint bytes_to_int(const Bytes& b);          // big-endian magnitude
void write_int(ByteWriter& w, const Bigint& x);  // length-prefixed form

std::string int_to_hex(const Bigint& x);
Bigint hex_to_int(const std::string& s);

// Thread-local exponentiation counter hook. Install with an RAII scope:
//   uint64_t n = 0;
//   { ExpCountScope scope(&n);  ... group operations ...; }
class ExpCountScope {
public:
    explicit ExpCountScope(uint64_t* counter);
    ~ExpCountScope();
    ExpCountScope(const ExpCountScope&) = delete;
    ExpCountScope& operator=(const ExpCountScope&) = delete;

private:
    uint64_t* prev_;
};

}  // namespace jcj

#endif
