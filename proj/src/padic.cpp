#include "rectint/padic.hpp"

#include <algorithm>

namespace rectint {

namespace {

bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

mpz_class digits_to_unit(const std::vector<std::uint32_t>& digits, std::uint32_t p) {
    mpz_class u = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        u *= p;
        u += *it;
    }
    return u;
}

}  // namespace

PrimeContext::PrimeContext(std::uint32_t prime, int n_digits) : p(prime), precision(n_digits) {
    if (!is_prime_u32(prime)) throw error("PrimeContext: p must be prime, got " + std::to_string(prime));
    if (n_digits < 1) throw error("PrimeContext: precision must be >= 1");
}

mpz_class PrimeContext::pow_p(long k) const {
    if (k < 0) throw error("pow_p: negative exponent");
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, static_cast<unsigned long>(k));
    return r;
}

long ord_of_integer(std::uint32_t p, const mpz_class& v) {
    if (v == 0) throw zero_input("ord_of_integer: ord(0) is infinite");
    mpz_class rest;
    mpz_class pz = p;
    return static_cast<long>(mpz_remove(rest.get_mpz_t(), v.get_mpz_t(), pz.get_mpz_t()));
}

long PAdicApprox::valuation() const {
    if (zero_) throw zero_input("valuation: undefined for the zero value");
    return val_;
}

PAdicApprox PAdicApprox::from_unit(const PrimeContext& ctx, long val, const mpz_class& unit,
                                   int known) {
    known = std::min(known, ctx.precision);
    if (known < 1) throw precision_exhausted("from_unit: no provable digit");
    mpz_class u = unit % ctx.pow_p(known);
    if (u < 0) u += ctx.pow_p(known);
    if (u == 0) throw error("from_unit: unit residue divisible by p^known");
    if (mpz_divisible_ui_p(u.get_mpz_t(), ctx.p))
        throw error("from_unit: unit residue divisible by p");
    PAdicApprox r;
    r.zero_ = false;
    r.val_ = val;
    r.digits_.reserve(known);
    mpz_class cur = u;
    for (int i = 0; i < known; ++i) {
        r.digits_.push_back(static_cast<std::uint32_t>(mpz_fdiv_ui(cur.get_mpz_t(), ctx.p)));
        mpz_fdiv_q_ui(cur.get_mpz_t(), cur.get_mpz_t(), ctx.p);
    }
    return r;
}

PAdicApprox PAdicApprox::from_integer(const PrimeContext& ctx, const mpz_class& v) {
    if (v == 0) return zero_value();
    mpz_class unit;
    mpz_class pz = ctx.p;
    long val = static_cast<long>(mpz_remove(unit.get_mpz_t(), v.get_mpz_t(), pz.get_mpz_t()));
    return from_unit(ctx, val, unit, ctx.precision);
}

PAdicApprox PAdicApprox::from_long(const PrimeContext& ctx, long v) {
    return from_integer(ctx, mpz_class(v));
}

PAdicApprox PAdicApprox::from_rational(const PrimeContext& ctx, const mpq_class& v) {
    if (v == 0) return zero_value();
    mpz_class num = v.get_num(), den = v.get_den();
    mpz_class unum, uden;
    mpz_class pz = ctx.p;
    long vn = static_cast<long>(mpz_remove(unum.get_mpz_t(), num.get_mpz_t(), pz.get_mpz_t()));
    long vd = static_cast<long>(mpz_remove(uden.get_mpz_t(), den.get_mpz_t(), pz.get_mpz_t()));
    mpz_class mod = ctx.pow_p(ctx.precision);
    mpz_class deninv;
    if (mpz_invert(deninv.get_mpz_t(), uden.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw error("from_rational: denominator not invertible");
    return from_unit(ctx, vn - vd, unum * deninv, ctx.precision);
}

mpz_class PAdicApprox::unit_residue(const PrimeContext& ctx, int k) const {
    if (zero_) throw zero_input("unit_residue: zero value");
    if (k > known_digits())
        throw precision_exhausted("unit_residue: only " + std::to_string(known_digits()) +
                                  " digits known, need " + std::to_string(k));
    mpz_class u = digits_to_unit(digits_, ctx.p);
    return u % ctx.pow_p(k);
}

PAdicApprox add(const PrimeContext& ctx, const PAdicApprox& a, const PAdicApprox& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    // Absolute window: both residues are known mod p^A.
    long aa = a.valuation() + a.known_digits();
    long ab = b.valuation() + b.known_digits();
    long window = std::min(aa, ab);
    long v0 = std::min(a.valuation(), b.valuation());
    long rel = window - v0;
    if (rel <= 0) throw precision_exhausted("add: operands share no absolute precision");
    mpz_class mod = ctx.pow_p(rel);
    mpz_class sa = a.unit_residue(ctx, a.known_digits()) * ctx.pow_p(a.valuation() - v0);
    mpz_class sb = b.unit_residue(ctx, b.known_digits()) * ctx.pow_p(b.valuation() - v0);
    mpz_class s = (sa + sb) % mod;
    if (s == 0) return PAdicApprox::zero_value();  // cancels to zero at this precision
    long t = ord_of_integer(ctx.p, s);
    mpz_class unit = s / ctx.pow_p(t);
    return PAdicApprox::from_unit(ctx, v0 + t, unit, static_cast<int>(rel - t));
}

PAdicApprox negate(const PrimeContext& ctx, const PAdicApprox& a) {
    if (a.is_zero()) return a;
    int known = a.known_digits();
    mpz_class u = ctx.pow_p(known) - a.unit_residue(ctx, known);
    return PAdicApprox::from_unit(ctx, a.valuation(), u, known);
}

PAdicApprox sub(const PrimeContext& ctx, const PAdicApprox& a, const PAdicApprox& b) {
    return add(ctx, a, negate(ctx, b));
}

PAdicApprox mul(const PrimeContext& ctx, const PAdicApprox& a, const PAdicApprox& b) {
    if (a.is_zero() || b.is_zero()) return PAdicApprox::zero_value();
    int known = std::min(a.known_digits(), b.known_digits());
    mpz_class u = a.unit_residue(ctx, known) * b.unit_residue(ctx, known);
    return PAdicApprox::from_unit(ctx, a.valuation() + b.valuation(), u, known);
}

PAdicApprox inv(const PrimeContext& ctx, const PAdicApprox& a) {
    if (a.is_zero()) throw division_by_zero("inv: division by zero");
    int known = a.known_digits();
    mpz_class mod = ctx.pow_p(known);
    mpz_class u;
    mpz_class au = a.unit_residue(ctx, known);
    if (mpz_invert(u.get_mpz_t(), au.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw error("inv: unit not invertible");  // unreachable: units are coprime to p
    return PAdicApprox::from_unit(ctx, -a.valuation(), u, known);
}

PAdicApprox pow_int(const PrimeContext& ctx, const PAdicApprox& a, long e) {
    if (e == 0) {
        if (a.is_zero()) throw zero_input("pow: 0^0");
        return PAdicApprox::from_long(ctx, 1);
    }
    if (a.is_zero()) {
        if (e < 0) throw division_by_zero("pow: negative power of zero");
        return PAdicApprox::zero_value();
    }
    PAdicApprox base = e < 0 ? inv(ctx, a) : a;
    unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
    int known = base.known_digits();
    mpz_class mod = ctx.pow_p(known);
    mpz_class u;
    mpz_class bu = base.unit_residue(ctx, known);
    mpz_powm_ui(u.get_mpz_t(), bu.get_mpz_t(), n, mod.get_mpz_t());
    return PAdicApprox::from_unit(ctx, base.valuation() * static_cast<long>(n), u, known);
}

namespace {

// Valuation of m mod p^cap; returns cap when m == 0 mod p^cap.
long ord_mod(std::uint32_t p, const mpz_class& m, long cap) {
    if (m == 0) return cap;
    mpz_class rest;
    mpz_class pz = p;
    long v = static_cast<long>(mpz_remove(rest.get_mpz_t(), m.get_mpz_t(), pz.get_mpz_t()));
    return std::min(v, cap);
}

mpz_class poly_eval_mod(const std::vector<mpz_class>& f, const mpz_class& a, const mpz_class& mod) {
    mpz_class r = 0;
    for (auto it = f.rbegin(); it != f.rend(); ++it) r = (r * a + *it) % mod;
    return r;
}

std::vector<mpz_class> poly_derivative(const std::vector<mpz_class>& f) {
    std::vector<mpz_class> d;
    for (std::size_t i = 1; i < f.size(); ++i) d.push_back(f[i] * static_cast<long>(i));
    if (d.empty()) d.push_back(0);
    return d;
}

// Newton iteration on residues mod p^M. Root is determined mod p^(M - e).
mpz_class newton_root(const PrimeContext& ctx, const std::vector<mpz_class>& f,
                      const std::vector<mpz_class>& fp, mpz_class a, long M, long e) {
    mpz_class mod = ctx.pow_p(M);
    for (int iter = 0; iter < 64; ++iter) {
        mpz_class fa = poly_eval_mod(f, a, mod);
        if (fa == 0) break;
        long vf = ord_mod(ctx.p, fa, M);
        mpz_class fpa = poly_eval_mod(fp, a, mod);
        long vfp = ord_mod(ctx.p, fpa, M);
        // delta = f(a)/f'(a) = p^(vf - vfp) * (uf / ufp)
        mpz_class uf = fa / ctx.pow_p(vf);
        mpz_class ufp = fpa / ctx.pow_p(vfp);
        mpz_class ufp_inv;
        mpz_invert(ufp_inv.get_mpz_t(), ufp.get_mpz_t(), mod.get_mpz_t());
        mpz_class delta = (uf * ufp_inv) % mod * ctx.pow_p(vf - vfp) % mod;
        a = (a - delta) % mod;
        if (a < 0) a += mod;
    }
    (void)e;
    return a;
}

}  // namespace

PAdicApprox hensel_lift(const PrimeContext& ctx, const std::vector<mpz_class>& f,
                        const PAdicApprox& alpha, long e) {
    if (e < 0) throw error("hensel_lift: e must be nonnegative");
    if (!alpha.is_zero() && alpha.valuation() < 0)
        throw hypothesis_failed("hensel_lift: alpha not in the valuation ring");

    // Work at the absolute precision of alpha; exact integer alphas carry N digits.
    long M = alpha.is_zero() ? static_cast<long>(ctx.precision) + 2 * e + 2
                             : alpha.valuation() + alpha.known_digits();
    if (M <= 2 * e)
        throw precision_exhausted("hensel_lift: cannot certify ord(f(alpha)) > 2e at precision " +
                                  std::to_string(M));
    mpz_class mod = ctx.pow_p(M);
    mpz_class a = alpha.is_zero()
                      ? mpz_class(0)
                      : mpz_class(alpha.unit_residue(ctx, alpha.known_digits()) *
                                  ctx.pow_p(alpha.valuation()) % mod);

    mpz_class fa = poly_eval_mod(f, a, mod);
    long vf = ord_mod(ctx.p, fa, M);
    if (vf <= 2 * e)
        throw hypothesis_failed("hensel_lift: ord(f(alpha)) = " + std::to_string(vf) +
                                " is not > 2e = " + std::to_string(2 * e));
    std::vector<mpz_class> fp = poly_derivative(f);
    mpz_class fpa = poly_eval_mod(fp, a, mod);
    long vfp = ord_mod(ctx.p, fpa, M);
    if (vfp > e)
        throw hypothesis_failed("hensel_lift: ord(f'(alpha)) = " + std::to_string(vfp) +
                                " is not <= e = " + std::to_string(e));

    mpz_class root = newton_root(ctx, f, fp, a, M, e);

    // The root is pinned mod p^(M - e).
    long pin = M - e;
    mpz_class pinned = root % ctx.pow_p(pin);
    if (pinned == 0) return PAdicApprox::zero_value();
    long v = ord_of_integer(ctx.p, pinned);
    return PAdicApprox::from_unit(ctx, v, pinned / ctx.pow_p(v), static_cast<int>(pin - v));
}

PAdicApprox nth_root(const PrimeContext& ctx, const PAdicApprox& x, long n, int k) {
    if (n <= 1) throw error("nth_root: n must be > 1");
    long e = ord_of_integer(ctx.p, mpz_class(n));
    if (k <= e) throw error("nth_root: need k > ord(n)");
    if (x.is_zero()) throw not_in_range("nth_root: zero has no angular part");
    int kp = k + static_cast<int>(e);
    if (x.known_digits() < kp)
        throw precision_exhausted("nth_root: need " + std::to_string(kp) + " digits");
    if (x.valuation() % n != 0)
        throw not_in_range("nth_root: ord(x) not divisible by n");
    mpz_class u = x.unit_residue(ctx, x.known_digits());
    if ((u - 1) % ctx.pow_p(kp) != 0)
        throw not_in_range("nth_root: angular part not 1 mod p^" + std::to_string(kp));

    // t^n = u, solved from t = 1; hypotheses hold since ord(1 - u) >= k + e > 2e.
    long M = x.known_digits();
    std::vector<mpz_class> f(static_cast<std::size_t>(n) + 1, mpz_class(0));
    f[0] = -u;
    f[static_cast<std::size_t>(n)] = 1;
    mpz_class root = newton_root(ctx, f, poly_derivative(f), mpz_class(1), M, e);
    long pin = M - e;
    mpz_class w = root % ctx.pow_p(pin);
    return PAdicApprox::from_unit(ctx, x.valuation() / n, w, static_cast<int>(pin));
}

bool member_rk(const PrimeContext& ctx, const PAdicApprox& x, int k) {
    if (k < 1) throw error("member_rk: k must be positive");
    if (x.is_zero()) return false;
    const auto& d = x.digits();
    int upto = std::min<int>(k, x.known_digits());
    if (d[0] != 1) return false;
    for (int i = 1; i < upto; ++i)
        if (d[static_cast<std::size_t>(i)] != 0) return false;
    if (x.known_digits() < k)
        throw precision_exhausted("member_rk: " + std::to_string(k) + " digits needed, " +
                                  std::to_string(x.known_digits()) + " known");
    return true;
}

bool member_pn(const PrimeContext& ctx, const PAdicApprox& x, long n) {
    if (n < 1) throw error("member_pn: n must be positive");
    if (x.is_zero()) throw zero_input("member_pn: zero is not in P_n");
    if (n == 1) return true;  // P_1 = K^x
    long e = ord_of_integer(ctx.p, mpz_class(n));
    int radius = static_cast<int>(2 * e + 1);
    if (x.known_digits() < radius)
        throw precision_exhausted("member_pn: need " + std::to_string(radius) + " digits");
    if (x.valuation() % n != 0) return false;
    mpz_class mod = ctx.pow_p(radius);
    mpz_class target = x.unit_residue(ctx, radius);
    // A witness w with w^n = u mod p^(2e+1) certifies u in P_n via Hensel
    // (ord of t^n - u at w exceeds 2e, derivative has ord exactly e).
    for (mpz_class w = 1; w < mod; ++w) {
        if (mpz_divisible_ui_p(w.get_mpz_t(), ctx.p)) continue;
        mpz_class pw;
        mpz_powm_ui(pw.get_mpz_t(), w.get_mpz_t(), static_cast<unsigned long>(n), mod.get_mpz_t());
        if (pw == target) return true;
    }
    return false;
}

}  // namespace rectint
