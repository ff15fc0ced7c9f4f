#include "cfde/render.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cfde {

namespace {

Trig trig_from_string(const std::string& s) {
    if (s == "none") return Trig::None;
    if (s == "cos") return Trig::Cos;
    if (s == "sin") return Trig::Sin;
    throw std::invalid_argument("unknown trig kind '" + s + "'");
}

BasisKind kind_from_string(const std::string& s) {
    if (s == "real") return BasisKind::Real;
    if (s == "cos") return BasisKind::CosPartner;
    if (s == "sin") return BasisKind::SinPartner;
    throw std::invalid_argument("unknown basis kind '" + s + "'");
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw std::invalid_argument(std::string("solution document is missing '") + key + "'");
    }
    return j.at(key);
}

}  // namespace

Json to_json(const UTerm& t) {
    return Json{{"coeff", t.coeff},
                {"upow", t.upow},
                {"erate", t.erate},
                {"trig", to_string(t.trig)},
                {"tfreq", t.tfreq}};
}

Json to_json(const UExpr& f) {
    Json arr = Json::array();
    for (const auto& t : f) arr.push_back(to_json(t));
    return arr;
}

Json to_json(const RootSet& roots) {
    Json arr = Json::array();
    for (const auto& e : roots.entries) {
        arr.push_back({{"re", e.root.real()}, {"im", e.root.imag()}, {"mult", e.multiplicity}});
    }
    return arr;
}

UExpr uexpr_from_json(const Json& j) {
    if (!j.is_array()) throw std::invalid_argument("expression must be a JSON array of terms");
    std::vector<UTerm> terms;
    for (const auto& t : j) {
        terms.push_back(make_term(field(t, "coeff").get<double>(), field(t, "upow").get<int>(),
                                  field(t, "erate").get<double>(),
                                  trig_from_string(field(t, "trig").get<std::string>()),
                                  field(t, "tfreq").get<double>()));
    }
    return canonicalize(std::move(terms));
}

Json to_json(const SolutionDocument& doc) {
    const auto& g = doc.solution;
    Json basis = Json::array();
    Json provenance = Json::array();
    for (int i = 0; i < g.basis.size(); ++i) {
        basis.push_back(to_json(g.basis.elements[std::size_t(i)]));
        const auto& p = g.basis.provenance[std::size_t(i)];
        provenance.push_back({{"re", p.root.real()},
                              {"im", p.root.imag()},
                              {"mult", p.multiplicity},
                              {"power", p.power},
                              {"kind", to_string(p.kind)}});
    }
    Json j{{"alpha", doc.spec.alpha()},
           {"order", doc.spec.order()},
           {"coeffs", doc.spec.coeffs},
           {"equation", doc.equation},
           {"forcing", to_json(doc.spec.forcing)},
           {"roots", to_json(g.basis.roots)},
           {"basis", basis},
           {"provenance", provenance},
           {"particular", g.particular ? to_json(*g.particular) : Json(nullptr)}};
    if (g.constants) j["constants"] = *g.constants;
    return j;
}

SolutionDocument solution_from_json(const Json& j) {
    const double alpha = field(j, "alpha").get<double>();
    auto coeffs = field(j, "coeffs").get<std::vector<double>>();
    UExpr forcing = j.contains("forcing") ? uexpr_from_json(j.at("forcing")) : UExpr{};
    SolutionDocument doc{ProblemSpec(std::move(coeffs), SubstMap(alpha), std::move(forcing)),
                         GeneralSolution{}, j.value("equation", std::string{})};
    if (j.contains("order") && j.at("order").get<int>() != doc.spec.order()) {
        throw std::invalid_argument("'order' does not match the number of coefficients");
    }

    auto& g = doc.solution;
    for (const auto& e : field(j, "basis")) g.basis.elements.push_back(uexpr_from_json(e));
    if (g.basis.size() != doc.spec.order()) {
        throw std::invalid_argument("basis size does not match the equation order");
    }
    if (j.contains("provenance")) {
        for (const auto& p : j.at("provenance")) {
            g.basis.provenance.push_back({Complex(field(p, "re").get<double>(), field(p, "im").get<double>()),
                                          field(p, "mult").get<int>(), field(p, "power").get<int>(),
                                          kind_from_string(field(p, "kind").get<std::string>())});
        }
    }
    if (j.contains("roots")) {
        for (const auto& r : j.at("roots")) {
            g.basis.roots.entries.push_back(
                {Complex(field(r, "re").get<double>(), field(r, "im").get<double>()),
                 field(r, "mult").get<int>()});
        }
    }
    if (j.contains("particular") && !j.at("particular").is_null()) {
        g.particular = uexpr_from_json(j.at("particular"));
    }
    if (j.contains("constants")) {
        auto c = j.at("constants").get<std::vector<double>>();
        if (static_cast<int>(c.size()) != doc.spec.order()) {
            throw std::invalid_argument("'constants' must hold one value per basis element");
        }
        g.constants = std::move(c);
    }
    return doc;
}

std::string format_root(Complex r) {
    if (r.imag() == 0.0) return format_real(r.real());
    return format_real(r.real()) + (r.imag() < 0 ? " - " : " + ") + format_real(std::abs(r.imag())) + "i";
}

std::string render_text(const SolutionDocument& doc) {
    const auto& spec = doc.spec;
    const auto& g = doc.solution;
    const SubstMap& s = spec.subst;
    const std::string a = format_real(spec.alpha());
    std::ostringstream os;
    if (!doc.equation.empty()) os << "equation: " << doc.equation << "\n";
    os << "alpha: " << a << "  (u = t^" << a << "/" << a << ")\n";
    os << "order: " << spec.order() << "\n";
    os << "characteristic roots:";
    for (const auto& e : g.basis.roots.entries) {
        os << "\n  " << format_root(e.root);
        if (e.multiplicity > 1) os << "  (multiplicity " << e.multiplicity << ")";
    }
    os << "\nbasis:\n";
    for (int i = 0; i < g.basis.size(); ++i) {
        const auto& y = g.basis.elements[std::size_t(i)];
        os << "  y" << i + 1 << " = " << to_u_string(y) << " = " << to_t_string(y, s) << "\n";
    }
    if (g.particular) {
        os << "particular:\n  v = " << to_u_string(*g.particular) << "\n    = "
           << to_t_string(*g.particular, s) << "\n";
    }
    os << "general solution:\n  y(t) = ";
    for (int i = 0; i < g.basis.size(); ++i) {
        if (i > 0) os << " + ";
        const std::string c =
            g.constants ? format_real((*g.constants)[std::size_t(i)]) : "c" + std::to_string(i + 1);
        os << c << "·" << (g.basis.elements[std::size_t(i)].size() > 1 ? "(" : "")
           << to_t_string(g.basis.elements[std::size_t(i)], s)
           << (g.basis.elements[std::size_t(i)].size() > 1 ? ")" : "");
    }
    if (g.particular) os << " + v(t)";
    os << "\n";
    if (g.constants) {
        os << "constants:";
        for (std::size_t i = 0; i < g.constants->size(); ++i) {
            os << " c" << i + 1 << " = " << format_real((*g.constants)[i]);
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace cfde
