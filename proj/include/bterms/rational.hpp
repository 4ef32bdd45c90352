#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace bterms {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rational_from(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational parse_rational(const std::string& s) {
    Rational r(s);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

// x^e for integer e (e may be negative; x must be nonzero then).
inline Rational rat_pow(const Rational& x, long e) {
    if (e == 0) return Rational(1);
    bool inv = e < 0;
    unsigned long ae = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    if (inv && x == 0) throw std::domain_error("rat_pow: zero base with negative exponent");
    Rational num, den;
    mpz_pow_ui(num.get_num_mpz_t(), x.get_num_mpz_t(), ae);
    mpz_pow_ui(num.get_den_mpz_t(), x.get_den_mpz_t(), ae);
    num.canonicalize();
    if (!inv) return num;
    return Rational(1) / num;
}

inline Rational rat_abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

inline Integer rat_ceil(const Rational& x) {
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return q;
}

inline Integer rat_floor(const Rational& x) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return q;
}

// Smallest rational of the form m*10^(-digits) that is >= x; identity when
// digits is absent.  x must be exactly representable (it is a rational).
inline Rational round_up_constant(const Rational& x, std::optional<int> digits) {
    if (!digits) return x;
    if (*digits < 0) throw std::invalid_argument("round_up_constant: negative digits");
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(*digits));
    Rational scaled = x * Rational(scale);
    Rational r(rat_ceil(scaled), scale);
    r.canonicalize();
    return r;
}

// v^(num/den) as an exact rational if v is a perfect den-th power, otherwise
// nothing.  v > 0 integer, exponent in lowest terms.
inline std::optional<Rational> int_pow_exact(unsigned long v, const Rational& e) {
    if (v == 0) throw std::domain_error("int_pow_exact: zero base");
    Integer base(static_cast<unsigned long>(v));
    Integer den = Integer(e.get_den());
    if (!den.fits_ulong_p()) return std::nullopt;
    unsigned long d = den.get_ui();
    Integer root;
    if (d > 1) {
        int exactp = mpz_root(root.get_mpz_t(), base.get_mpz_t(), d);
        if (!exactp) return std::nullopt;
    } else {
        root = base;
    }
    Integer num = Integer(e.get_num());
    bool neg = num < 0;
    Integer anum = neg ? Integer(-num) : num;
    if (!anum.fits_ulong_p()) return std::nullopt;
    Integer p;
    mpz_pow_ui(p.get_mpz_t(), root.get_mpz_t(), anum.get_ui());
    Rational r(p);
    if (neg) r = Rational(1) / r;
    return r;
}

namespace detail {

// Upper bound of x as a rational, reading off the binary float exactly.
inline Rational mpfr_to_rational(const mpfr_t x) {
    if (!mpfr_number_p(x)) throw std::overflow_error("mpfr_to_rational: non-finite");
    mpq_t q;
    mpq_init(q);
    mpfr_get_q(q, x);
    Rational r(q);
    mpq_clear(q);
    r.canonicalize();
    return r;
}

}  // namespace detail

// Certified evaluation of C + c * v^e (v positive integer, e rational),
// rounded up onto the decimal grid when digits is set, otherwise returned as
// a tight rational upper bound.  Used by B-term absorption where the lift
// factor v^e is usually irrational.
inline Rational add_scaled_power_round_up(const Rational& C, const Rational& c, unsigned long v,
                                          const Rational& e, std::optional<int> digits) {
    if (c == 0) return round_up_constant(C, digits);
    if (auto exact = int_pow_exact(v, e)) {
        return round_up_constant(C + c * *exact, digits);
    }
    // Irrational power: certified enclosure, refined until the ceiling is
    // decided (the exact value is provably off-grid).
    for (mpfr_prec_t prec = 192; prec <= 4096; prec *= 2) {
        mpfr_t lo, hi, t;
        mpfr_inits2(prec, lo, hi, t, static_cast<mpfr_ptr>(nullptr));
        mpfr_set_ui(t, v, MPFR_RNDN);
        // v^e = exp(e * log v), outward in both directions
        mpfr_t elo, ehi;
        mpfr_inits2(prec, elo, ehi, static_cast<mpfr_ptr>(nullptr));
        mpfr_set_q(elo, e.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(ehi, e.get_mpq_t(), MPFR_RNDU);
        mpfr_log(lo, t, MPFR_RNDD);
        mpfr_log(hi, t, MPFR_RNDU);  // log v > 0 since v>=1; v==1 handled by exact path
        // pick exponent pairing by sign for outward product
        mpfr_t plo, phi;
        mpfr_inits2(prec, plo, phi, static_cast<mpfr_ptr>(nullptr));
        if (e >= 0) {
            mpfr_mul(plo, elo, lo, MPFR_RNDD);
            mpfr_mul(phi, ehi, hi, MPFR_RNDU);
        } else {
            mpfr_mul(plo, elo, hi, MPFR_RNDD);
            mpfr_mul(phi, ehi, lo, MPFR_RNDU);
        }
        mpfr_exp(plo, plo, MPFR_RNDD);
        mpfr_exp(phi, phi, MPFR_RNDU);
        Rational vlo = detail::mpfr_to_rational(plo);
        Rational vhi = detail::mpfr_to_rational(phi);
        mpfr_clears(lo, hi, t, elo, ehi, plo, phi, static_cast<mpfr_ptr>(nullptr));
        Rational tlo = C + c * (c >= 0 ? vlo : vhi);
        Rational thi = C + c * (c >= 0 ? vhi : vlo);
        if (!digits) return thi;
        Rational rlo = round_up_constant(tlo, digits);
        Rational rhi = round_up_constant(thi, digits);
        if (rlo == rhi) return rhi;
    }
    throw std::runtime_error("add_scaled_power_round_up: failed to separate grid point");
}

}  // namespace bterms
