#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace valgroup {

using BigInt = boost::multiprecision::cpp_int;

/// p^e as an exact integer (e >= 0).
inline BigInt int_pow(long long base, long long exp) {
    BigInt r = 1;
    BigInt b = base;
    while (exp > 0) {
        if (exp & 1) r *= b;
        b *= b;
        exp >>= 1;
    }
    return r;
}

/// Largest e with p^e | n, for n != 0 (uses |n|).
inline int padic_valuation(long long n, long long p) {
    if (n < 0) n = -n;
    int e = 0;
    while (n != 0 && n % p == 0) {
        n /= p;
        ++e;
    }
    return e;
}

/// Multiplicative inverse of a modulo m, for gcd(a, m) = 1, m >= 2.
inline BigInt mod_inverse(const BigInt& a, const BigInt& m) {
    BigInt old_r = a % m, r = m;
    if (old_r < 0) old_r += m;
    BigInt old_s = 1, s = 0;
    while (r != 0) {
        BigInt q = old_r / r;
        BigInt t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    // old_r == gcd; caller guarantees it is 1
    BigInt inv = old_s % m;
    if (inv < 0) inv += m;
    return inv;
}

/// Deterministic primality test by trial division.
inline bool is_prime(long long n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    if (n % 3 == 0) return n == 3;
    for (long long f = 5; f * f <= n; f += 6) {
        if (n % f == 0 || n % (f + 2) == 0) return false;
    }
    return true;
}

} // namespace valgroup
