#pragma once

#include <mutex>
#include <vector>

#include "bterms/expansion.hpp"

namespace bterms {

// Bernoulli numbers, B1 = -1/2 convention.
inline Rational bernoulli(unsigned m) {
    static std::vector<Rational> cache{Rational(1)};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    while (cache.size() <= m) {
        unsigned n = static_cast<unsigned>(cache.size());
        // sum_{j=0}^{n} C(n+1, j) B_j = 0
        Rational s(0);
        Integer binom;
        for (unsigned j = 0; j < n; ++j) {
            mpz_bin_uiui(binom.get_mpz_t(), n + 1, j);
            s += Rational(binom) * cache[j];
        }
        cache.push_back(-s / Rational(static_cast<long>(n) + 1));
    }
    return cache[m];
}

// Closed form for sum_{j=1}^{k} j^r as a polynomial in k.
inline KPolynomial faulhaber(unsigned r) {
    if (r < 1) throw std::invalid_argument("faulhaber: r >= 1 required");
    KPolynomial p;
    Integer binom;
    for (unsigned i = 0; i <= r; ++i) {
        mpz_bin_uiui(binom.get_mpz_t(), r + 1, i);
        Rational c = Rational(binom) * bernoulli(i) / Rational(static_cast<long>(r) + 1);
        if (i % 2 == 1) c = -c;  // switches to the B1 = +1/2 convention
        p.add_coeff(r + 1 - i, c);
    }
    return p;
}

inline Rational factorial_rat(unsigned n) {
    Integer f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rational(f);
}

namespace detail {

// Certified upper bound of e^x for rational x.
inline Rational exp_upper(const Rational& x) {
    mpfr_t t;
    mpfr_init2(t, 192);
    mpfr_set_q(t, x.get_mpq_t(), MPFR_RNDU);
    mpfr_exp(t, t, MPFR_RNDU);
    Rational r = mpfr_to_rational(t);
    mpfr_clear(t);
    return r;
}

// Certified upper bound of -log(1-r) for rational 0 <= r < 1.
inline Rational neg_log1m_upper(const Rational& r) {
    mpfr_t t;
    mpfr_init2(t, 192);
    Rational om = Rational(1) - r;
    mpfr_set_q(t, om.get_mpq_t(), MPFR_RNDD);
    mpfr_log(t, t, MPFR_RNDD);
    mpfr_neg(t, t, MPFR_RNDU);
    Rational out = mpfr_to_rational(t);
    mpfr_clear(t);
    return out;
}

}  // namespace detail

enum class KernelId { Exp, Geometric, EvenGeometric, Log1p };

// Analytic kernel with exact series coefficients and a certified bound
// M(m, r) >= sup_{|x|<=r} |f^(m)(x)| / m!.
class Kernel {
  public:
    static Kernel exp() { return Kernel(KernelId::Exp, "exp"); }
    static Kernel geometric() { return Kernel(KernelId::Geometric, "geometric"); }
    static Kernel even_geometric() { return Kernel(KernelId::EvenGeometric, "even-geometric"); }
    static Kernel log1p() { return Kernel(KernelId::Log1p, "log1p"); }

    static Kernel by_name(const std::string& name) {
        if (name == "exp") return exp();
        if (name == "geometric") return geometric();
        if (name == "even-geometric") return even_geometric();
        if (name == "log1p") return log1p();
        throw std::invalid_argument("unknown kernel: " + name);
    }

    const std::string& name() const { return name_; }
    KernelId id() const { return id_; }

    // Radius of validity of the Taylor machinery (infinite for exp).
    bool radius_is_finite() const { return id_ != KernelId::Exp; }
    Rational radius() const { return Rational(1); }  // for the finite-radius kernels

    Rational series_coeff(unsigned i) const {
        switch (id_) {
            case KernelId::Exp: return Rational(1) / factorial_rat(i);
            case KernelId::Geometric: return Rational(1);
            case KernelId::EvenGeometric: return i % 2 == 0 ? Rational(1) : Rational(0);
            case KernelId::Log1p:
                if (i == 0) return Rational(0);
                return Rational(i % 2 == 1 ? 1 : -1) / Rational(static_cast<long>(i));
        }
        throw std::logic_error("unreachable");
    }

    // Certified upper bound of sup_{|x|<=r} |f^(m)(x)| / m!.
    Rational deriv_bound_upper(unsigned m, const Rational& r) const {
        if (r < 0) throw std::invalid_argument("deriv_bound_upper: r >= 0 required");
        if (radius_is_finite() && r >= radius())
            throw std::domain_error("deriv_bound_upper: radius exceeded");
        Rational one_m = Rational(1) - r, one_p = Rational(1) + r;
        switch (id_) {
            case KernelId::Exp: return detail::exp_upper(r) / factorial_rat(m);
            case KernelId::Geometric: return rat_pow(one_m, -(static_cast<long>(m) + 1));
            case KernelId::EvenGeometric: {
                Rational a = rat_pow(one_m, -(static_cast<long>(m) + 1));
                Rational b = rat_pow(one_p, -(static_cast<long>(m) + 1));
                return m % 2 == 0 ? Rational((a + b) / 2) : Rational((a - b) / 2);
            }
            case KernelId::Log1p:
                if (m == 0) return detail::neg_log1m_upper(r);
                return Rational(1) / (Rational(static_cast<long>(m)) * rat_pow(one_m, static_cast<long>(m)));
        }
        throw std::logic_error("unreachable");
    }

    // Exact f^(m)(x)/m! for the rational kernels (testing hook).
    Rational deriv_exact(unsigned m, const Rational& x) const {
        switch (id_) {
            case KernelId::Geometric: return rat_pow(Rational(1) - x, -(static_cast<long>(m) + 1));
            case KernelId::EvenGeometric: {
                Rational a = rat_pow(Rational(1) - x, -(static_cast<long>(m) + 1));
                Rational b = rat_pow(Rational(1) + x, -(static_cast<long>(m) + 1));
                return m % 2 == 0 ? Rational((a + b) / 2) : Rational((a - b) / 2);
            }
            case KernelId::Log1p: {
                if (m == 0) throw std::invalid_argument("deriv_exact: use value for m = 0");
                Rational v = Rational(1) / (Rational(static_cast<long>(m)) * rat_pow(Rational(1) + x, static_cast<long>(m)));
                return m % 2 == 1 ? v : -v;
            }
            case KernelId::Exp: throw std::invalid_argument("deriv_exact: exp is not rational");
        }
        throw std::logic_error("unreachable");
    }

    // Exact value for the rational kernels.
    Rational value_exact(const Rational& x) const {
        switch (id_) {
            case KernelId::Geometric: return Rational(1) / (Rational(1) - x);
            case KernelId::EvenGeometric: return Rational(1) / (Rational(1) - x * x);
            default: throw std::invalid_argument("value_exact: kernel not rational");
        }
    }

  private:
    Kernel(KernelId id, std::string name) : id_(id), name_(std::move(name)) {}
    KernelId id_;
    std::string name_;
};

enum class RemainderRounding { IntegerCeil, Grid };

// Taylor expansion of kernel(arg) to the given order with a fully explicit
// Lagrange-remainder B-term, envelope-sound for n >= valid_from.
inline Expansion taylor_with_explicit_error(const Kernel& kernel, const Expansion& arg, unsigned order,
                                            unsigned long valid_from,
                                            RemainderRounding rounding = RemainderRounding::IntegerCeil) {
    const RingConfig& cfg = arg.config();
    if (order < 1) throw std::invalid_argument("taylor_with_explicit_error: order >= 1");
    for (const Term& t : arg.terms()) {
        if (t.kind == TermKind::OTerm)
            throw std::invalid_argument("taylor_with_explicit_error: argument must not contain O-terms");
        if (growth_range(t, cfg).upper > 0)
            throw std::domain_error("taylor_with_explicit_error: argument upper growth must be <= 0");
    }
    if (arg.is_zero()) return Expansion::constant(cfg, kernel.series_coeff(0));

    Rational r = majorant_value_upper(arg, valid_from);
    if (kernel.radius_is_finite() && r >= kernel.radius())
        throw std::domain_error("taylor_with_explicit_error: argument radius " + r.get_str() +
                                " >= kernel radius at valid_from = " + std::to_string(valid_from));
    Rational m_raw = kernel.deriv_bound_upper(order, r);
    Rational M = rounding == RemainderRounding::IntegerCeil ? Rational(rat_ceil(m_raw))
                                                            : round_up_constant(m_raw, cfg.round_digits);

    unsigned long vmax = valid_from;
    for (const Term& t : arg.terms()) vmax = std::max(vmax, t.valid_from);

    std::vector<Expansion> pieces;
    Expansion arg_pow = Expansion::constant(cfg, Rational(1));
    for (unsigned i = 0; i < order; ++i) {
        Rational ci = kernel.series_coeff(i);
        if (ci != 0) pieces.push_back(arg_pow * ci);
        arg_pow = mul(arg_pow, arg);
    }

    // |remainder| <= M * (sum of absolute majorants)^order, expanded per
    // n-power into individual B-terms and re-absorbed below.
    std::map<Rational, KPolynomial> maj_pow;
    maj_pow[Rational(0)] = KPolynomial(Rational(1));
    for (unsigned i = 0; i < order; ++i) {
        std::map<Rational, KPolynomial> next;
        for (auto& [q, poly] : maj_pow)
            for (const Term& t : arg.terms()) {
                KPolynomial prod = poly * t.coeff.abs();
                if (prod.is_zero()) continue;
                next[q + t.q] += prod;
            }
        maj_pow = std::move(next);
    }
    for (auto& [q, poly] : maj_pow) {
        KPolynomial maj = poly * M;
        if (!maj.is_zero()) pieces.push_back(Expansion::bterm(cfg, maj, q, vmax));
    }
    return add_all(cfg, pieces);
}

}  // namespace bterms
