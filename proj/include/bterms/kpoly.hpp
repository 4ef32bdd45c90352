#pragma once

#include <map>
#include <sstream>
#include <vector>

#include "bterms/rational.hpp"

namespace bterms {

// Polynomial in the dependent variable k with rational coefficients.
// Zero coefficients are never stored; the empty map is the zero polynomial.
class KPolynomial {
  public:
    KPolynomial() = default;
    explicit KPolynomial(const Rational& c) {
        if (c != 0) coeffs_[0] = c;
    }
    KPolynomial(const Rational& c, unsigned degree) {
        if (c != 0) coeffs_[degree] = c;
    }

    static KPolynomial k(unsigned degree = 1) { return KPolynomial(Rational(1), degree); }

    bool is_zero() const { return coeffs_.empty(); }
    bool is_constant() const { return coeffs_.empty() || (coeffs_.size() == 1 && coeffs_.begin()->first == 0); }

    unsigned min_degree() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }
    unsigned max_degree() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

    Rational coeff(unsigned d) const {
        auto it = coeffs_.find(d);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    void set_coeff(unsigned d, const Rational& c) {
        if (c == 0)
            coeffs_.erase(d);
        else
            coeffs_[d] = c;
    }

    void add_coeff(unsigned d, const Rational& c) { set_coeff(d, coeff(d) + c); }

    const std::map<unsigned, Rational>& coeffs() const { return coeffs_; }

    KPolynomial operator-() const {
        KPolynomial r;
        for (auto& [d, c] : coeffs_) r.coeffs_[d] = -c;
        return r;
    }

    KPolynomial& operator+=(const KPolynomial& o) {
        for (auto& [d, c] : o.coeffs_) add_coeff(d, c);
        return *this;
    }
    friend KPolynomial operator+(KPolynomial a, const KPolynomial& b) { return a += b; }
    friend KPolynomial operator-(KPolynomial a, const KPolynomial& b) { return a += -b; }

    friend KPolynomial operator*(const KPolynomial& a, const KPolynomial& b) {
        KPolynomial r;
        for (auto& [da, ca] : a.coeffs_)
            for (auto& [db, cb] : b.coeffs_) r.add_coeff(da + db, ca * cb);
        return r;
    }

    KPolynomial& operator*=(const Rational& c) {
        if (c == 0) {
            coeffs_.clear();
            return *this;
        }
        for (auto& [d, v] : coeffs_) v *= c;
        return *this;
    }
    friend KPolynomial operator*(KPolynomial a, const Rational& c) { return a *= c; }
    friend KPolynomial operator*(const Rational& c, KPolynomial a) { return a *= c; }

    bool operator==(const KPolynomial& o) const { return coeffs_ == o.coeffs_; }

    // Coefficientwise absolute value.
    KPolynomial abs() const {
        KPolynomial r;
        for (auto& [d, c] : coeffs_) r.coeffs_[d] = rat_abs(c);
        return r;
    }

    // Sum of |coefficients|, i.e. the constant of the top-degree majorization
    // |p(k)| <= (sum |c_i|) k^maxdeg for k >= 1.
    Rational abs_coeff_sum() const {
        Rational s(0);
        for (auto& [d, c] : coeffs_) s += rat_abs(c);
        return s;
    }

    Rational eval(const Rational& k) const {
        // Horner over the sparse map (descending).
        Rational acc(0);
        long prev = -1;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            if (prev >= 0) acc *= rat_pow(Rational(k), prev - static_cast<long>(it->first));
            acc += it->second;
            prev = static_cast<long>(it->first);
        }
        if (prev > 0) acc *= rat_pow(Rational(k), prev);
        return acc;
    }

    std::vector<std::pair<unsigned, Rational>> monomials_descending() const {
        std::vector<std::pair<unsigned, Rational>> v(coeffs_.rbegin(), coeffs_.rend());
        return v;
    }

    // Renders SageMath-style: "7351/250*k^3 + 30*k^2 + 30*k + 10".
    std::string str() const {
        if (coeffs_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            const Rational& c = it->second;
            if (!first)
                os << (c < 0 ? " - " : " + ");
            else if (c < 0)
                os << "-";
            Rational a = rat_abs(c);
            unsigned d = it->first;
            if (d == 0) {
                os << a.get_str();
            } else {
                if (a != 1) os << a.get_str() << "*";
                os << "k";
                if (d > 1) os << "^" << d;
            }
            first = false;
        }
        return os.str();
    }

    bool operator<(const KPolynomial& o) const { return coeffs_ < o.coeffs_; }

  private:
    std::map<unsigned, Rational> coeffs_;
};

}  // namespace bterms
