#ifndef RECTINT_PADIC_HPP
#define RECTINT_PADIC_HPP

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "rectint/errors.hpp"

namespace rectint {

// Fixed prime and working relative precision shared by every value of one
// computation. The numeric layer is Q_p: the uniformizer is p itself and the
// residue field has q = p elements.
struct PrimeContext {
    std::uint32_t p;
    int precision;  // N, number of significant base-p digits tracked

    PrimeContext(std::uint32_t prime, int n_digits);

    mpz_class pow_p(long k) const;  // p^k, k >= 0
};

// A p-adic number known to a finite number of significant digits.
// Invariants: zero values carry no digits; nonzero values have
// 1 <= digits.size() <= N and digits[0] != 0. Equality is representational:
// equal (zero, valuation, digits).
class PAdicApprox {
public:
    PAdicApprox() : zero_(true), val_(0) {}

    static PAdicApprox zero_value() { return PAdicApprox(); }
    static PAdicApprox from_integer(const PrimeContext& ctx, const mpz_class& v);
    static PAdicApprox from_long(const PrimeContext& ctx, long v);
    static PAdicApprox from_rational(const PrimeContext& ctx, const mpq_class& v);
    // Assemble from valuation + unit residue known modulo p^known.
    static PAdicApprox from_unit(const PrimeContext& ctx, long val, const mpz_class& unit,
                                 int known);

    bool is_zero() const { return zero_; }
    long valuation() const;
    int known_digits() const { return static_cast<int>(digits_.size()); }
    const std::vector<std::uint32_t>& digits() const { return digits_; }

    // Unit (angular) part as an integer residue mod p^k; requires k <= known.
    mpz_class unit_residue(const PrimeContext& ctx, int k) const;

    bool operator==(const PAdicApprox& o) const {
        return zero_ == o.zero_ && (zero_ || (val_ == o.val_ && digits_ == o.digits_));
    }
    bool operator!=(const PAdicApprox& o) const { return !(*this == o); }

private:
    bool zero_;
    long val_;
    std::vector<std::uint32_t> digits_;  // little-endian, digits_[0] != 0
};

// Valuation of a nonzero integer; ord(0) would be infinite and is rejected.
long ord_of_integer(std::uint32_t p, const mpz_class& v);

PAdicApprox add(const PrimeContext& ctx, const PAdicApprox& a, const PAdicApprox& b);
PAdicApprox negate(const PrimeContext& ctx, const PAdicApprox& a);
PAdicApprox sub(const PrimeContext& ctx, const PAdicApprox& a, const PAdicApprox& b);
PAdicApprox mul(const PrimeContext& ctx, const PAdicApprox& a, const PAdicApprox& b);
PAdicApprox inv(const PrimeContext& ctx, const PAdicApprox& a);
PAdicApprox pow_int(const PrimeContext& ctx, const PAdicApprox& a, long e);

// Root of f near alpha per Hensel's lemma: requires ord(f(alpha)) > 2e and
// ord(f'(alpha)) <= e, both certified from the known digits. f is given by
// integer coefficients, constant term first.
PAdicApprox hensel_lift(const PrimeContext& ctx, const std::vector<mpz_class>& f,
                        const PAdicApprox& alpha, long e);

// Unique y in K^(k) with y^n = x, for x in P_n^(k') and k' = k + ord(n).
// The result loses ord(n) significant digits relative to x.
PAdicApprox nth_root(const PrimeContext& ctx, const PAdicApprox& x, long n, int k);

// x in R^(k): x nonzero and its angular part is 1 mod p^k.
bool member_rk(const PrimeContext& ctx, const PAdicApprox& x, int k);

// x in P_n: n divides ord(x) and the angular part is an n-th power, decided
// by search over residues mod p^(2 ord(n) + 1) backed by Hensel's lemma.
bool member_pn(const PrimeContext& ctx, const PAdicApprox& x, long n);

}  // namespace rectint

#endif
