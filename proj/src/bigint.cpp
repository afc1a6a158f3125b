#include "jcj/bigint.hpp"

#include <stdexcept>

namespace jcj {

namespace {
thread_local uint64_t* g_exp_counter = nullptr;
}

ExpCountScope::ExpCountScope(uint64_t* counter) : prev_(g_exp_counter) {
    g_exp_counter = counter;
}

ExpCountScope::~ExpCountScope() { g_exp_counter = prev_; }

Bigint modpow(const Bigint& base, const Bigint& exp, const Bigint& mod) {
    if (g_exp_counter) (*g_exp_counter)++;
    Bigint r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return r;
}

Bigint modinv(const Bigint& a, const Bigint& mod) {
    Bigint r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0) {
        throw std::domain_error("modinv: element not invertible");
    }
    return r;
}

Bigint mulmod(const Bigint& a, const Bigint& b, const Bigint& mod) {
    Bigint r = a * b;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), mod.get_mpz_t());
    return r;
}

Bytes int_to_bytes(const Bigint& x) {
    if (sgn(x) < 0) throw std::invalid_argument("int_to_bytes: negative value");
    if (sgn(x) == 0) return {};
    size_t count = 0;
    Bytes out((mpz_sizeinbase(x.get_mpz_t(), 2) + 7) / 8);
    mpz_export(out.data(), &count, 1, 1, 1, 0, x.get_mpz_t());
    out.resize(count);
    return out;
}

Bigint bytes_to_int(const Bytes& b) {
    Bigint r;
    if (!b.empty()) mpz_import(r.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
    return r;
}

void write_int(ByteWriter& w, const Bigint& x) { w.blob(int_to_bytes(x)); }

std::string int_to_hex(const Bigint& x) { return x.get_str(16); }

Bigint hex_to_int(const std::string& s) {
    Bigint r;
    if (r.set_str(s, 16) != 0) throw std::invalid_argument("hex_to_int: bad number");
    return r;
}

}  // namespace jcj
