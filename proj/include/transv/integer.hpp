#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace transv {

// Exact integers. All coefficient arithmetic in the library goes through
// this alias; fixed-width overflow is never acceptable in a verifier.
using Int = mpz_class;

inline Int int_from(long long v) {
    static_assert(sizeof(long) >= sizeof(long long), "need 64-bit long");
    return Int(static_cast<long>(v));
}

inline Int int_gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// Floor division (quotient rounded toward -inf), so remainders are canonical.
inline Int int_fdiv_q(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int int_fdiv_r(const Int& a, const Int& b) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline bool int_divisible(const Int& a, const Int& b) {
    return mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()) != 0;
}

inline Int int_divexact(const Int& a, const Int& b) {
    Int q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

}  // namespace transv
