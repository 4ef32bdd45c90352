#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bterms/kpoly.hpp"
#include "bterms/rational.hpp"

namespace bterms {

// Ring parameters: the dependent variable k satisfies n^alpha <= k <= n^beta.
struct RingConfig {
    Rational alpha = Rational(0);
    Rational beta;
    std::optional<int> round_digits;
    int default_prec = 5;

    RingConfig() = default;
    RingConfig(Rational a, Rational b, std::optional<int> digits = std::nullopt, int prec = 5)
        : alpha(std::move(a)), beta(std::move(b)), round_digits(digits), default_prec(prec) {
        if (alpha < 0 || beta <= alpha) throw std::invalid_argument("RingConfig: need 0 <= alpha < beta");
    }

    bool operator==(const RingConfig& o) const {
        return alpha == o.alpha && beta == o.beta && round_digits == o.round_digits &&
               default_prec == o.default_prec;
    }
};

struct GrowthRange {
    Rational lower, upper;
};

enum class TermKind { Exact, OTerm, BTerm };

// One summand of an asymptotic expansion: c(k) * n^q, O(n^q), or
// B-term with |error| <= majorant(k) * n^q for n >= valid_from.
struct Term {
    TermKind kind = TermKind::Exact;
    KPolynomial coeff;  // Exact coefficient or B-term majorant; unused for O
    Rational q;
    unsigned long valid_from = 0;

    static Term exact(KPolynomial c, Rational q) { return Term{TermKind::Exact, std::move(c), std::move(q), 0}; }
    static Term oterm(Rational q) { return Term{TermKind::OTerm, KPolynomial(), std::move(q), 0}; }
    static Term bterm(KPolynomial maj, Rational q, unsigned long v) {
        return Term{TermKind::BTerm, std::move(maj), std::move(q), v};
    }

    bool is_zero() const { return kind != TermKind::OTerm && coeff.is_zero(); }
    bool is_error() const { return kind != TermKind::Exact; }
};

inline GrowthRange growth_range(const Term& t, const RingConfig& cfg) {
    if (t.kind == TermKind::OTerm) return {t.q, t.q};
    return {t.q + cfg.alpha * Rational(static_cast<long>(t.coeff.min_degree())),
            t.q + cfg.beta * Rational(static_cast<long>(t.coeff.max_degree()))};
}

namespace detail {

inline int kind_rank(TermKind k) {
    switch (k) {
        case TermKind::Exact: return 0;
        case TermKind::BTerm: return 1;
        case TermKind::OTerm: return 2;
    }
    return 3;
}

// Strict descending order by (upper growth, lower growth); error terms sort
// after exact terms on full growth ties, further tie-broken deterministically.
struct TermLess {
    const RingConfig* cfg;
    bool operator()(const Term& a, const Term& b) const {
        GrowthRange ga = growth_range(a, *cfg), gb = growth_range(b, *cfg);
        if (ga.upper != gb.upper) return ga.upper > gb.upper;
        if (ga.lower != gb.lower) return ga.lower > gb.lower;
        int ra = kind_rank(a.kind), rb = kind_rank(b.kind);
        if (ra != rb) return ra < rb;
        if (a.q != b.q) return a.q > b.q;
        if (a.valid_from != b.valid_from) return a.valid_from < b.valid_from;
        return a.coeff < b.coeff;
    }
};

}  // namespace detail

inline bool can_absorb(const Term& b, const Term& t, const RingConfig& cfg) {
    if (b.kind != TermKind::BTerm) throw std::invalid_argument("can_absorb: absorber must be a B-term");
    if (t.is_zero()) return true;
    if (t.kind == TermKind::OTerm) return false;
    GrowthRange gb = growth_range(b, cfg), gt = growth_range(t, cfg);
    return gt.upper <= gb.upper && gt.lower <= gb.lower;
}

// Absorbs t into the B-term b per the majorize / degree-reduce / lift / round
// procedure.  Caller must have checked can_absorb.
inline Term absorb_into_bterm(const Term& b, const Term& t, const RingConfig& cfg) {
    if (!can_absorb(b, t, cfg)) throw std::invalid_argument("absorb_into_bterm: term not absorbable");
    if (t.is_zero()) return b;
    Term r = b;
    Rational m = t.coeff.abs_coeff_sum();
    long d = static_cast<long>(t.coeff.max_degree());
    Rational p = t.q;
    long D = static_cast<long>(b.coeff.max_degree());
    while (d > D) {
        --d;
        p += cfg.beta;  // k <= n^beta
    }
    while (p > b.q && d < D && cfg.alpha > 0) {
        ++d;
        p -= cfg.alpha;  // k >= n^alpha
    }
    if (p > b.q) throw std::logic_error("absorb_into_bterm: exponent lift failed");
    unsigned long v = std::max(b.valid_from, t.valid_from);
    r.valid_from = v;
    Rational cur = r.coeff.coeff(static_cast<unsigned>(d));
    Rational next = add_scaled_power_round_up(cur, m, v, p - b.q, cfg.round_digits);
    r.coeff.set_coeff(static_cast<unsigned>(d), next);
    // Re-apply the grid to every coefficient (idempotent on grid values).
    KPolynomial rounded;
    for (auto& [deg, c] : r.coeff.coeffs()) rounded.set_coeff(deg, round_up_constant(c, cfg.round_digits));
    r.coeff = rounded;
    return r;
}

class Expansion {
  public:
    Expansion() = default;
    explicit Expansion(RingConfig cfg) : cfg_(std::move(cfg)) {}

    static Expansion zero(const RingConfig& cfg) { return Expansion(cfg); }
    static Expansion constant(const RingConfig& cfg, const Rational& c) {
        return exact(cfg, KPolynomial(c), Rational(0));
    }
    static Expansion exact(const RingConfig& cfg, KPolynomial c, Rational q) {
        Expansion e(cfg);
        if (!c.is_zero()) e.terms_.push_back(Term::exact(std::move(c), std::move(q)));
        return e;
    }
    static Expansion npow(const RingConfig& cfg, Rational q) {
        return exact(cfg, KPolynomial(Rational(1)), std::move(q));
    }
    static Expansion oterm(const RingConfig& cfg, Rational q) {
        Expansion e(cfg);
        e.terms_.push_back(Term::oterm(std::move(q)));
        return e;
    }
    static Expansion bterm(const RingConfig& cfg, const KPolynomial& maj, Rational q, unsigned long v) {
        Expansion e(cfg);
        KPolynomial rounded;
        for (auto& [d, c] : maj.coeffs()) {
            if (c < 0) throw std::invalid_argument("bterm: majorant coefficients must be >= 0");
            rounded.set_coeff(d, round_up_constant(c, cfg.round_digits));
        }
        if (!rounded.is_zero()) e.terms_.push_back(Term::bterm(std::move(rounded), std::move(q), v));
        return e;
    }
    // Assembles a pre-built term list: sorts but performs no merging or
    // absorption.  Used by simplify/collapse which manage terms themselves.
    static Expansion raw(const RingConfig& cfg, std::vector<Term> terms) {
        Expansion e(cfg);
        e.terms_ = std::move(terms);
        std::stable_sort(e.terms_.begin(), e.terms_.end(), detail::TermLess{&e.cfg_});
        return e;
    }

    const RingConfig& config() const { return cfg_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool operator==(const Expansion& o) const;

    std::string str() const;

  private:
    RingConfig cfg_;
    std::vector<Term> terms_;

    friend Expansion normalize_terms(const RingConfig& cfg, std::vector<Term> ts);
};

// Core normalization: merge exact terms by q, merge O-terms, sort, then one
// greedy absorption sweep in sorted order.
inline Expansion normalize_terms(const RingConfig& cfg, std::vector<Term> ts) {
    std::vector<Term> kept;
    std::map<Rational, KPolynomial> exacts;
    std::optional<Rational> o_q;
    for (auto& t : ts) {
        if (t.is_zero()) continue;
        if (t.kind == TermKind::Exact) {
            exacts[t.q] += t.coeff;
        } else if (t.kind == TermKind::OTerm) {
            if (!o_q || t.q > *o_q) o_q = t.q;
        } else {
            kept.push_back(std::move(t));
        }
    }
    for (auto& [q, c] : exacts)
        if (!c.is_zero()) kept.push_back(Term::exact(c, q));
    if (o_q) kept.push_back(Term::oterm(*o_q));
    std::stable_sort(kept.begin(), kept.end(), detail::TermLess{&cfg});

    std::vector<Term> out;
    for (auto& t : kept) {
        // Find the eligible absorber with the smallest upper growth;
        // O-terms are preferred over B-terms on ties.
        int best = -1;
        Rational best_upper, best_lower;
        bool best_is_o = false;
        GrowthRange gt = growth_range(t, cfg);
        for (int i = 0; i < static_cast<int>(out.size()); ++i) {
            const Term& e = out[i];
            if (!e.is_error()) continue;
            bool ok = false;
            GrowthRange ge = growth_range(e, cfg);
            if (e.kind == TermKind::OTerm) {
                ok = gt.upper <= e.q;
            } else {
                ok = (t.kind != TermKind::OTerm) && gt.upper <= ge.upper && gt.lower <= ge.lower;
            }
            if (!ok) continue;
            bool is_o = e.kind == TermKind::OTerm;
            if (best < 0 || ge.upper < best_upper ||
                (ge.upper == best_upper && is_o && !best_is_o) ||
                (ge.upper == best_upper && is_o == best_is_o && ge.lower < best_lower)) {
                best = i;
                best_upper = ge.upper;
                best_lower = ge.lower;
                best_is_o = is_o;
            }
        }
        if (best >= 0) {
            if (out[best].kind == TermKind::BTerm) out[best] = absorb_into_bterm(out[best], t, cfg);
            continue;  // absorbed into O: dropped entirely
        }
        out.push_back(t);
        if (t.is_error()) {
            // Back-absorb exact/B terms already emitted with identical growth
            // (they sort before error terms on full ties).
            for (int i = static_cast<int>(out.size()) - 2; i >= 0; --i) {
                GrowthRange gi = growth_range(out[i], cfg);
                GrowthRange gn = growth_range(out.back(), cfg);
                if (gi.upper != gn.upper || gi.lower != gn.lower) break;
                const Term& victim = out[i];
                Term& err = out.back();
                if (err.kind == TermKind::OTerm) {
                    if (gi.upper <= err.q) {
                        out.erase(out.begin() + i);
                    }
                } else if (victim.kind != TermKind::OTerm && can_absorb(err, victim, cfg)) {
                    err = absorb_into_bterm(err, victim, cfg);
                    out.erase(out.begin() + i);
                }
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), detail::TermLess{&cfg});
    Expansion e(cfg);
    e.terms_ = std::move(out);
    return e;
}

inline Expansion add(const Expansion& x, const Expansion& y) {
    if (!(x.config() == y.config())) throw std::invalid_argument("add: mismatched ring configs");
    std::vector<Term> ts = x.terms();
    ts.insert(ts.end(), y.terms().begin(), y.terms().end());
    return normalize_terms(x.config(), std::move(ts));
}

inline Expansion add_all(const RingConfig& cfg, const std::vector<Expansion>& xs) {
    std::vector<Term> ts;
    for (auto& x : xs) {
        if (!(x.config() == cfg)) throw std::invalid_argument("add_all: mismatched ring configs");
        ts.insert(ts.end(), x.terms().begin(), x.terms().end());
    }
    return normalize_terms(cfg, std::move(ts));
}

inline Expansion mul(const Expansion& x, const Expansion& y) {
    if (!(x.config() == y.config())) throw std::invalid_argument("mul: mismatched ring configs");
    const RingConfig& cfg = x.config();
    std::vector<Term> ts;
    for (const Term& a : x.terms()) {
        for (const Term& b : y.terms()) {
            const Term *pe = &a, *po = &b;
            auto ga = growth_range(a, cfg), gb = growth_range(b, cfg);
            if (a.kind == TermKind::OTerm || b.kind == TermKind::OTerm) {
                // Any product with an O-term is an O-term at summed upper growth.
                ts.push_back(Term::oterm(ga.upper + gb.upper));
                continue;
            }
            if (a.kind == TermKind::Exact && b.kind == TermKind::Exact) {
                ts.push_back(Term::exact(a.coeff * b.coeff, a.q + b.q));
                continue;
            }
            if (a.kind == TermKind::Exact) std::swap(pe, po);
            // po is Exact or BTerm, pe is BTerm
            KPolynomial maj = pe->coeff * (po->kind == TermKind::Exact ? po->coeff.abs() : po->coeff);
            ts.push_back(Term::bterm(std::move(maj), pe->q + po->q,
                                     std::max(pe->valid_from, po->valid_from)));
        }
    }
    return normalize_terms(cfg, std::move(ts));
}

inline Expansion neg(const Expansion& x) {
    std::vector<Term> ts = x.terms();
    for (auto& t : ts)
        if (t.kind == TermKind::Exact) t.coeff = -t.coeff;
    return Expansion::raw(x.config(), std::move(ts));
}

inline Expansion operator+(const Expansion& a, const Expansion& b) { return add(a, b); }
inline Expansion operator-(const Expansion& a, const Expansion& b) { return add(a, neg(b)); }
inline Expansion operator*(const Expansion& a, const Expansion& b) { return mul(a, b); }
inline Expansion operator*(const Expansion& a, const Rational& c) {
    return mul(a, Expansion::constant(a.config(), c));
}
inline Expansion operator*(const Rational& c, const Expansion& a) { return a * c; }

inline Expansion pow(const Expansion& x, unsigned e) {
    Expansion r = Expansion::constant(x.config(), Rational(1));
    for (unsigned i = 0; i < e; ++i) r = mul(r, x);
    return r;
}

// Splits exact coefficients into monomials and lets error terms absorb every
// monomial they are able to; remaining monomials that were upper-eligible for
// some error term are re-emitted separately from the untouched ones.
inline Expansion simplify_expansion(const Expansion& x) {
    const RingConfig& cfg = x.config();
    std::vector<Term> errors;
    struct Item {
        KPolynomial poly;
        Rational q;
    };
    std::vector<Item> items;
    for (const Term& t : x.terms()) {
        if (t.is_error())
            errors.push_back(t);
        else
            for (auto& [d, c] : t.coeff.coeffs()) items.push_back({KPolynomial(c, d), t.q});
    }
    auto item_growth = [&](const Item& it) {
        return growth_range(Term::exact(it.poly, it.q), cfg);
    };
    std::stable_sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
        auto ga = item_growth(a), gb = item_growth(b);
        if (ga.upper != gb.upper) return ga.upper > gb.upper;
        if (ga.lower != gb.lower) return ga.lower > gb.lower;
        return a.q > b.q;
    });
    std::map<Rational, KPolynomial> main_bucket, residual_bucket;
    for (auto& it : items) {
        Term as_term = Term::exact(it.poly, it.q);
        GrowthRange gt = item_growth(it);
        int best = -1;
        Rational best_upper, best_lower;
        bool best_is_o = false;
        bool upper_eligible = false;
        for (int i = 0; i < static_cast<int>(errors.size()); ++i) {
            GrowthRange ge = growth_range(errors[i], cfg);
            if (gt.upper <= ge.upper) upper_eligible = true;
            bool ok = errors[i].kind == TermKind::OTerm
                          ? gt.upper <= errors[i].q
                          : (gt.upper <= ge.upper && gt.lower <= ge.lower);
            if (!ok) continue;
            bool is_o = errors[i].kind == TermKind::OTerm;
            if (best < 0 || ge.upper < best_upper ||
                (ge.upper == best_upper && is_o && !best_is_o) ||
                (ge.upper == best_upper && is_o == best_is_o && ge.lower < best_lower)) {
                best = i;
                best_upper = ge.upper;
                best_lower = ge.lower;
                best_is_o = is_o;
            }
        }
        if (best >= 0) {
            if (errors[best].kind == TermKind::BTerm)
                errors[best] = absorb_into_bterm(errors[best], as_term, cfg);
            continue;
        }
        (upper_eligible ? residual_bucket : main_bucket)[it.q] += it.poly;
    }
    std::vector<Term> out;
    for (auto& [q, c] : main_bucket)
        if (!c.is_zero()) out.push_back(Term::exact(c, q));
    for (auto& e : errors) out.push_back(e);
    for (auto& [q, c] : residual_bucket)
        if (!c.is_zero()) out.push_back(Term::exact(c, q));
    return Expansion::raw(cfg, std::move(out));
}

// Replaces k by n^beta inside every B-term majorant, merging all B-terms into
// a single k-free B-term at the maximal upper growth; exact monomials whose
// growth falls under the collapsed term are absorbed as well.
inline Expansion collapse_bterm_growth(const Expansion& x) {
    const RingConfig& cfg = x.config();
    struct Piece {
        Rational c;   // non-negative contribution
        Rational q;   // k-free exponent after substitution
    };
    std::vector<Piece> pieces;
    std::vector<Term> oterms;
    unsigned long v = 0;
    bool has_b = false;
    struct Item {
        KPolynomial poly;
        Rational q;
    };
    std::vector<Item> exact_items;
    for (const Term& t : x.terms()) {
        if (t.kind == TermKind::BTerm) {
            has_b = true;
            v = std::max(v, t.valid_from);
            for (auto& [d, c] : t.coeff.coeffs())
                pieces.push_back({c, t.q + cfg.beta * Rational(static_cast<long>(d))});
        } else if (t.kind == TermKind::OTerm) {
            oterms.push_back(t);
        } else {
            for (auto& [d, c] : t.coeff.coeffs()) exact_items.push_back({KPolynomial(c, d), t.q});
        }
    }
    if (!has_b) throw std::invalid_argument("collapse_bterm_growth: no B-term present");
    Rational qstar = pieces.front().q;
    for (auto& p : pieces) qstar = std::max(qstar, p.q);
    // Eligible exact monomials join the collapse as k-free pieces.
    std::vector<Item> keep;
    for (auto& it : exact_items) {
        GrowthRange g = growth_range(Term::exact(it.poly, it.q), cfg);
        if (g.upper <= qstar && g.lower <= qstar) {
            auto [d, c] = *it.poly.coeffs().begin();
            pieces.push_back({rat_abs(c), it.q + cfg.beta * Rational(static_cast<long>(d))});
        } else {
            keep.push_back(it);
        }
    }
    std::stable_sort(pieces.begin(), pieces.end(),
                     [](const Piece& a, const Piece& b) { return a.q > b.q; });
    Rational C(0);
    for (auto& p : pieces) C = add_scaled_power_round_up(C, p.c, v, p.q - qstar, cfg.round_digits);
    std::vector<Term> out;
    std::map<Rational, KPolynomial> merged;
    for (auto& it : keep) merged[it.q] += it.poly;
    for (auto& [q, c] : merged)
        if (!c.is_zero()) out.push_back(Term::exact(c, q));
    out.push_back(Term::bterm(KPolynomial(C), qstar, v));
    for (auto& o : oterms) out.push_back(o);
    return Expansion::raw(cfg, std::move(out));
}

namespace detail {

// Upper bound of sum_t |coeff_t|(k0) * n0^{q_t} at n0, k0 = n0^beta.
// Exact when the powers happen to be rational; otherwise certified via MPFR.
inline Rational term_value_upper(const KPolynomial& abspoly, const Rational& q, unsigned long n0,
                                 const RingConfig& cfg) {
    Rational total(0);
    for (auto& [d, c] : abspoly.coeffs()) {
        Rational e = q + cfg.beta * Rational(static_cast<long>(d));
        total = add_scaled_power_round_up(total, c, n0, e, std::nullopt);
    }
    return total;
}

}  // namespace detail

// Certified upper bound of the expansion's absolute-coefficient majorant at
// (n, k) = (n0, n0^beta).  O-terms have no constant and are rejected.
inline Rational majorant_value_upper(const Expansion& x, unsigned long n0) {
    Rational total(0);
    for (const Term& t : x.terms()) {
        if (t.kind == TermKind::OTerm)
            throw std::invalid_argument("majorant_value_upper: O-term has no explicit constant");
        total += detail::term_value_upper(t.coeff.abs(), t.q, n0, x.config());
    }
    return total;
}

// Geometric-series inversion of an expansion with a k-free exact leading
// term.  With valid_from set the remainder is certified as a B-term, else it
// is an O-term at the remainder's upper growth.
inline Expansion invert_leading_kfree(const Expansion& x, int prec,
                                      std::optional<unsigned long> valid_from = std::nullopt) {
    if (x.is_zero()) throw std::invalid_argument("invert_leading_kfree: zero expansion");
    const RingConfig& cfg = x.config();
    const Term& lead = x.terms().front();
    if (lead.kind != TermKind::Exact || !lead.coeff.is_constant())
        throw std::invalid_argument("invert_leading_kfree: leading term must be exact and k-free");
    Rational c0 = lead.coeff.coeff(0);
    Rational p = lead.q;
    std::vector<Term> rest_terms(x.terms().begin() + 1, x.terms().end());
    Expansion rest = Expansion::raw(cfg, std::move(rest_terms));
    Expansion scale = Expansion::exact(cfg, KPolynomial(Rational(1) / c0), -p);
    Expansion u = mul(rest, scale);
    Expansion inv_lead = Expansion::exact(cfg, KPolynomial(Rational(1) / c0), -p);
    if (u.is_zero()) return inv_lead;

    Expansion part = Expansion::constant(cfg, Rational(1));
    Expansion mu = neg(u);
    Expansion mu_pow = Expansion::constant(cfg, Rational(1));
    for (int i = 1; i < prec; ++i) {
        mu_pow = mul(mu_pow, mu);
        part = add(part, mu_pow);
    }
    std::vector<Expansion> pieces{part};
    if (!valid_from) {
        Rational uu = growth_range(u.terms().front(), cfg).upper;
        pieces.push_back(Expansion::oterm(cfg, Rational(static_cast<long>(prec)) * uu));
    } else {
        // remainder = (-u)^prec / (1 + u); bound 1/(1+u) by 1/(1 - U0).
        Rational U0 = majorant_value_upper(u, *valid_from);
        if (U0 >= 1)
            throw std::domain_error("invert_leading_kfree: |u| >= 1 at valid_from = " +
                                    std::to_string(*valid_from));
        Rational c_geo = round_up_constant(Rational(1) / (Rational(1) - U0), cfg.round_digits);
        Expansion upow = mul(mu_pow, mu);  // (-u)^prec
        std::vector<Term> rem;
        for (const Term& t : upow.terms()) {
            if (t.kind == TermKind::OTerm)
                throw std::invalid_argument("invert_leading_kfree: O-term in certified remainder");
            KPolynomial maj = t.coeff.abs() * c_geo;
            KPolynomial rounded;
            for (auto& [d, c] : maj.coeffs()) rounded.set_coeff(d, round_up_constant(c, cfg.round_digits));
            rem.push_back(Term::bterm(rounded, t.q, std::max(t.valid_from, *valid_from)));
        }
        pieces.push_back(normalize_terms(cfg, std::move(rem)));
    }
    return mul(add_all(cfg, pieces), inv_lead);
}

inline Expansion operator/(const Expansion& a, const Expansion& b) {
    return mul(a, invert_leading_kfree(b, b.config().default_prec));
}

inline bool Expansion::operator==(const Expansion& o) const {
    if (!(cfg_ == o.cfg_) || terms_.size() != o.terms_.size()) return false;
    for (size_t i = 0; i < terms_.size(); ++i) {
        const Term &a = terms_[i], &b = o.terms_[i];
        if (a.kind != b.kind || a.q != b.q || a.valid_from != b.valid_from || !(a.coeff == b.coeff))
            return false;
    }
    return true;
}

namespace detail {

inline std::string npower_str(const Rational& q) {
    if (q == 0) return "";
    if (q == 1) return "n";
    if (q.get_den() == 1 && q > 0) return "n^" + q.get_str();
    return "n^(" + q.get_str() + ")";
}

inline std::string render_term(const Term& t, bool& negative) {
    negative = false;
    std::ostringstream os;
    if (t.kind == TermKind::OTerm) {
        os << "O(" << (t.q == 0 ? "1" : npower_str(t.q)) << ")";
        return os.str();
    }
    if (t.kind == TermKind::BTerm) {
        std::string np = npower_str(t.q);
        os << "B(";
        if (t.coeff.is_constant()) {
            Rational c0 = t.coeff.coeff(0);
            if (c0 != 1 || np.empty()) {
                os << c0.get_str();
                if (!np.empty()) os << "*";
            }
            os << np;
        } else if (t.coeff.coeffs().size() == 1) {
            auto [d, c] = *t.coeff.coeffs().begin();
            if (c != 1) os << c.get_str() << "*";
            os << "abs(k" << (d > 1 ? "^" + std::to_string(d) : "") << ")";
            if (!np.empty()) os << "*" << np;
        } else {
            os << "(abs(" << t.coeff.str() << "))";
            if (!np.empty()) os << "*" << np;
        }
        os << ", n >= " << t.valid_from << ")";
        return os.str();
    }
    // Exact term
    std::string np = npower_str(t.q);
    const KPolynomial& c = t.coeff;
    if (c.is_constant()) {
        Rational v = c.coeff(0);
        negative = v < 0;
        Rational a = rat_abs(v);
        if (np.empty())
            os << a.get_str();
        else if (a == 1)
            os << np;
        else
            os << a.get_str() << "*" << np;
        return os.str();
    }
    if (c.coeffs().size() == 1) {
        auto [d, v] = *c.coeffs().begin();
        negative = v < 0;
        Rational a = rat_abs(v);
        if (a != 1) os << a.get_str() << "*";
        os << "k";
        if (d > 1) os << "^" << d;
        if (!np.empty()) os << "*" << np;
        return os.str();
    }
    os << "(" << c.str() << ")";
    if (!np.empty()) os << "*" << np;
    return os.str();
}

}  // namespace detail

inline std::string Expansion::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const Term& t : terms_) {
        bool negative = false;
        std::string s = detail::render_term(t, negative);
        if (first) {
            if (negative) os << "-";
            os << s;
            first = false;
        } else {
            os << (negative ? " - " : " + ") << s;
        }
    }
    return os.str();
}

inline std::string growth_range_str(const GrowthRange& g) {
    auto one = [](const Rational& q) {
        if (q == 0) return std::string("1");
        return detail::npower_str(q);
    };
    return "(" + one(g.lower) + ", " + one(g.upper) + ")";
}

}  // namespace bterms
