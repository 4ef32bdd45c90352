#pragma once

#include <json.hpp>

#include "bterms/expansion.hpp"

namespace bterms {

inline nlohmann::json to_json(const KPolynomial& p) {
    nlohmann::json j = nlohmann::json::object();
    for (auto& [d, c] : p.coeffs()) j[std::to_string(d)] = c.get_str();
    return j;
}

inline KPolynomial kpoly_from_json(const nlohmann::json& j) {
    KPolynomial p;
    for (auto it = j.begin(); it != j.end(); ++it)
        p.set_coeff(static_cast<unsigned>(std::stoul(it.key())), parse_rational(it.value().get<std::string>()));
    return p;
}

inline nlohmann::json to_json(const Expansion& x) {
    nlohmann::json j;
    const RingConfig& c = x.config();
    j["alpha"] = c.alpha.get_str();
    j["beta"] = c.beta.get_str();
    if (c.round_digits)
        j["round_digits"] = *c.round_digits;
    else
        j["round_digits"] = nullptr;
    j["default_prec"] = c.default_prec;
    nlohmann::json terms = nlohmann::json::array();
    for (const Term& t : x.terms()) {
        nlohmann::json tj;
        switch (t.kind) {
            case TermKind::Exact: tj["kind"] = "exact"; break;
            case TermKind::OTerm: tj["kind"] = "o"; break;
            case TermKind::BTerm: tj["kind"] = "b"; break;
        }
        tj["q"] = t.q.get_str();
        if (t.kind != TermKind::OTerm) tj["coeff"] = to_json(t.coeff);
        if (t.kind == TermKind::BTerm) tj["valid_from"] = t.valid_from;
        terms.push_back(tj);
    }
    j["terms"] = terms;
    return j;
}

inline Expansion expansion_from_json(const nlohmann::json& j) {
    std::optional<int> digits;
    if (!j.at("round_digits").is_null()) digits = j.at("round_digits").get<int>();
    RingConfig cfg(parse_rational(j.at("alpha").get<std::string>()),
                   parse_rational(j.at("beta").get<std::string>()), digits,
                   j.at("default_prec").get<int>());
    std::vector<Term> ts;
    for (auto& tj : j.at("terms")) {
        std::string kind = tj.at("kind").get<std::string>();
        Rational q = parse_rational(tj.at("q").get<std::string>());
        if (kind == "o") {
            ts.push_back(Term::oterm(q));
        } else if (kind == "exact") {
            ts.push_back(Term::exact(kpoly_from_json(tj.at("coeff")), q));
        } else {
            ts.push_back(Term::bterm(kpoly_from_json(tj.at("coeff")), q,
                                     tj.at("valid_from").get<unsigned long>()));
        }
    }
    return Expansion::raw(cfg, std::move(ts));
}

}  // namespace bterms
