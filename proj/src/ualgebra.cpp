#include "cfde/ualgebra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <tuple>

namespace cfde {

namespace {

bool same_key_value(double x, double y) {
    return std::abs(x - y) <= kKeyTol * std::max({1.0, std::abs(x), std::abs(y)});
}

bool same_key(const UTerm& a, const UTerm& b) {
    return a.upow == b.upow && a.trig == b.trig && same_key_value(a.erate, b.erate) &&
           same_key_value(a.tfreq, b.tfreq);
}

bool key_less(const UTerm& a, const UTerm& b) {
    return std::tie(a.erate, a.tfreq, a.trig, a.upow) <
           std::tie(b.erate, b.tfreq, b.trig, b.upow);
}

// Applies parity and snaps near-zero rates/frequencies. Returns false when the
// term vanishes identically (sin(0 u)).
bool normalize(UTerm& t) {
    if (t.trig == Trig::None) {
        t.tfreq = 0.0;
    } else {
        if (t.tfreq < 0.0) {
            t.tfreq = -t.tfreq;
            if (t.trig == Trig::Sin) t.coeff = -t.coeff;
        }
        if (t.tfreq <= kKeyTol) {
            if (t.trig == Trig::Sin) return false;
            t.trig = Trig::None;
            t.tfreq = 0.0;
        }
    }
    if (std::abs(t.erate) <= kKeyTol) t.erate = 0.0;
    return t.coeff != 0.0;
}

struct Bucket {
    UTerm term;
    double max_abs = 0.0;
};

std::vector<UTerm> product_terms(const UTerm& a, const UTerm& b) {
    const double c = a.coeff * b.coeff;
    const int k = a.upow + b.upow;
    const double r = a.erate + b.erate;
    if (a.trig == Trig::None) return {make_term(c, k, r, b.trig, b.tfreq)};
    if (b.trig == Trig::None) return {make_term(c, k, r, a.trig, a.tfreq)};

    const double diff = a.tfreq - b.tfreq;
    const double sum = a.tfreq + b.tfreq;
    const double h = 0.5 * c;
    if (a.trig == Trig::Cos && b.trig == Trig::Cos) {
        return {make_term(h, k, r, Trig::Cos, diff), make_term(h, k, r, Trig::Cos, sum)};
    }
    if (a.trig == Trig::Sin && b.trig == Trig::Sin) {
        return {make_term(h, k, r, Trig::Cos, diff), make_term(-h, k, r, Trig::Cos, sum)};
    }
    // sin(x) cos(y) = (sin(x+y) + sin(x-y)) / 2
    if (a.trig == Trig::Sin) {
        return {make_term(h, k, r, Trig::Sin, sum), make_term(h, k, r, Trig::Sin, diff)};
    }
    // cos(x) sin(y) = (sin(x+y) - sin(x-y)) / 2
    return {make_term(h, k, r, Trig::Sin, sum), make_term(-h, k, r, Trig::Sin, diff)};
}

double trig_value(Trig trig, double x) {
    switch (trig) {
        case Trig::Cos: return std::cos(x);
        case Trig::Sin: return std::sin(x);
        case Trig::None: break;
    }
    return 1.0;
}

void integrate_term(const UTerm& t, std::vector<UTerm>& out) {
    const int k = t.upow;
    if (t.trig == Trig::None && t.erate == 0.0) {
        out.push_back(make_term(t.coeff / (k + 1), k + 1));
        return;
    }
    // Repeated integration by parts, unrolled:
    //   int u^k e^{zu} du = e^{zu} sum_j (-1)^j k!/(k-j)! u^{k-j} / z^{j+1}
    // with z = r + i w; cos/sin terms are the real/imaginary parts.
    const std::complex<double> z(t.erate, t.trig == Trig::None ? 0.0 : t.tfreq);
    std::complex<double> w = 1.0 / z;  // j = 0 weight
    double falling = 1.0;               // k!/(k-j)!
    for (int j = 0; j <= k; ++j) {
        if (j > 0) {
            falling *= static_cast<double>(k - j + 1);
            w /= z;
        }
        const std::complex<double> cj = (j % 2 == 0 ? 1.0 : -1.0) * falling * w * t.coeff;
        const int p = k - j;
        switch (t.trig) {
            case Trig::None:
                out.push_back(make_term(cj.real(), p, t.erate));
                break;
            case Trig::Cos:
                out.push_back(make_term(cj.real(), p, t.erate, Trig::Cos, t.tfreq));
                out.push_back(make_term(-cj.imag(), p, t.erate, Trig::Sin, t.tfreq));
                break;
            case Trig::Sin:
                out.push_back(make_term(cj.imag(), p, t.erate, Trig::Cos, t.tfreq));
                out.push_back(make_term(cj.real(), p, t.erate, Trig::Sin, t.tfreq));
                break;
        }
    }
}

}  // namespace

const char* to_string(Trig trig) noexcept {
    switch (trig) {
        case Trig::Cos: return "cos";
        case Trig::Sin: return "sin";
        case Trig::None: break;
    }
    return "none";
}

UTerm make_term(double coeff, int upow, double erate, Trig trig, double tfreq) {
    if (upow < 0) throw std::invalid_argument("make_term: negative power of u");
    UTerm t{coeff, upow, erate, trig, trig == Trig::None ? 0.0 : tfreq};
    if (t.trig != Trig::None && t.tfreq < 0.0) {
        t.tfreq = -t.tfreq;
        if (t.trig == Trig::Sin) t.coeff = -t.coeff;
    }
    return t;
}

UExpr UExpr::constant(double c) { return canonicalize({make_term(c)}); }
UExpr UExpr::term(const UTerm& t) { return canonicalize({t}); }
UExpr UExpr::u_power(int k, double coeff) { return canonicalize({make_term(coeff, k)}); }
UExpr UExpr::exponential(double rate, double coeff) {
    return canonicalize({make_term(coeff, 0, rate)});
}

SubstMap::SubstMap(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1], got " + format_real(alpha));
    }
}

double SubstMap::u_of(double t) const {
    if (!(t > 0.0)) throw DomainError("evaluation requires t > 0, got " + format_real(t));
    return std::pow(t, alpha_) / alpha_;
}

UExpr canonicalize(std::vector<UTerm> terms) {
    std::vector<Bucket> buckets;
    buckets.reserve(terms.size());
    for (UTerm t : terms) {
        if (!normalize(t)) continue;
        auto it = std::find_if(buckets.begin(), buckets.end(),
                               [&](const Bucket& b) { return same_key(b.term, t); });
        if (it == buckets.end()) {
            buckets.push_back({t, std::abs(t.coeff)});
        } else {
            it->term.coeff += t.coeff;
            it->max_abs = std::max(it->max_abs, std::abs(t.coeff));
        }
    }
    std::vector<UTerm> out;
    out.reserve(buckets.size());
    for (const auto& b : buckets) {
        if (std::abs(b.term.coeff) < kPruneRelTol * std::max(1.0, b.max_abs)) continue;
        out.push_back(b.term);
    }
    std::sort(out.begin(), out.end(), key_less);
    return UExpr(std::move(out));
}

UExpr add(const UExpr& f, const UExpr& g) {
    std::vector<UTerm> all(f.begin(), f.end());
    all.insert(all.end(), g.begin(), g.end());
    return canonicalize(std::move(all));
}

UExpr sub(const UExpr& f, const UExpr& g) { return add(f, scale(g, -1.0)); }

UExpr mul(const UExpr& f, const UExpr& g) {
    std::vector<UTerm> all;
    all.reserve(2 * f.size() * g.size());
    for (const auto& a : f) {
        for (const auto& b : g) {
            auto p = product_terms(a, b);
            all.insert(all.end(), p.begin(), p.end());
        }
    }
    return canonicalize(std::move(all));
}

UExpr scale(const UExpr& f, double c) {
    std::vector<UTerm> all(f.begin(), f.end());
    for (auto& t : all) t.coeff *= c;
    return canonicalize(std::move(all));
}

UExpr div_by_term(const UExpr& f, const UTerm& d) {
    if (d.upow != 0 || d.trig != Trig::None) {
        throw std::invalid_argument("div_by_term: divisor must be c·e^{ru}");
    }
    if (d.coeff == 0.0) throw std::invalid_argument("div_by_term: zero divisor");
    std::vector<UTerm> all(f.begin(), f.end());
    for (auto& t : all) {
        t.coeff /= d.coeff;
        t.erate -= d.erate;
    }
    return canonicalize(std::move(all));
}

UExpr diff_u(const UExpr& f) {
    std::vector<UTerm> out;
    out.reserve(3 * f.size());
    for (const auto& t : f) {
        if (t.upow > 0) {
            out.push_back(make_term(t.coeff * t.upow, t.upow - 1, t.erate, t.trig, t.tfreq));
        }
        if (t.erate != 0.0) {
            out.push_back(make_term(t.coeff * t.erate, t.upow, t.erate, t.trig, t.tfreq));
        }
        if (t.trig == Trig::Cos) {
            out.push_back(make_term(-t.coeff * t.tfreq, t.upow, t.erate, Trig::Sin, t.tfreq));
        } else if (t.trig == Trig::Sin) {
            out.push_back(make_term(t.coeff * t.tfreq, t.upow, t.erate, Trig::Cos, t.tfreq));
        }
    }
    return canonicalize(std::move(out));
}

UExpr diff_u(const UExpr& f, int times) {
    if (times < 0) throw std::invalid_argument("diff_u: negative order");
    UExpr g = f;
    for (int i = 0; i < times; ++i) g = diff_u(g);
    return g;
}

UExpr integrate_u(const UExpr& f) {
    std::vector<UTerm> out;
    for (const auto& t : f) integrate_term(t, out);
    return canonicalize(std::move(out));
}

double eval_u(const UExpr& f, double u) {
    double acc = 0.0;
    for (const auto& t : f) {
        double v = t.coeff;
        if (t.upow > 0) v *= std::pow(u, t.upow);
        if (t.erate != 0.0) v *= std::exp(t.erate * u);
        v *= trig_value(t.trig, t.tfreq * u);
        acc += v;
    }
    return acc;
}

double eval(const UExpr& f, double t, const SubstMap& subst) {
    return eval_u(f, subst.u_of(t));
}

double magnitude(const UExpr& f, double t, const SubstMap& subst) {
    const double u = subst.u_of(t);
    double acc = 0.0;
    for (const auto& term : f) {
        acc += std::abs(term.coeff) * std::pow(u, term.upow) * std::exp(term.erate * u);
    }
    return acc;
}

bool approx_equal(const UExpr& f, const UExpr& g, double rel_tol) {
    if (f.size() != g.size()) return false;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto& a = f.terms()[i];
        const auto& b = g.terms()[i];
        if (!same_key(a, b)) return false;
        const double s = std::max({1.0, std::abs(a.coeff), std::abs(b.coeff)});
        if (std::abs(a.coeff - b.coeff) > rel_tol * s) return false;
    }
    return true;
}

double coefficient(const UExpr& f, int upow, double erate, Trig trig, double tfreq) {
    UTerm probe = make_term(1.0, upow, erate, trig, tfreq);
    for (const auto& t : f) {
        if (same_key(t, probe)) return t.coeff;
    }
    return 0.0;
}

// Rendering ------------------------------------------------------------------

std::string format_real(double x) {
    if (x == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_coeff(double x) {
    if (std::isfinite(x) && x != 0.0) {
        for (long q = 1; q <= 1000; ++q) {
            const double p = std::round(x * static_cast<double>(q));
            if (p == 0.0 || std::abs(p) > 1e9) continue;
            if (std::abs(p / static_cast<double>(q) - x) <= 1e-12 * std::max(1.0, std::abs(x))) {
                const auto pi = static_cast<long long>(p);
                if (q == 1) return std::to_string(pi);
                return "(" + std::to_string(pi) + "/" + std::to_string(q) + ")";
            }
        }
    }
    return format_real(x);
}

namespace {

std::string rate_times(double r, const std::string& var) {
    if (r == 1.0) return var;
    if (r == -1.0) return "-" + var;
    return format_real(r) + var;
}

std::string join_terms(const std::vector<std::pair<double, std::vector<std::string>>>& parts,
                       bool rational) {
    if (parts.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [c, factors] : parts) {
        const double mag = std::abs(c);
        std::string body;
        if (factors.empty() || mag != 1.0) body = rational ? format_coeff(mag) : format_real(mag);
        for (const auto& f : factors) {
            if (!body.empty()) body += "·";
            body += f;
        }
        if (first) {
            out = (c < 0 ? "-" : "") + body;
            first = false;
        } else {
            out += (c < 0 ? " - " : " + ") + body;
        }
    }
    return out;
}

}  // namespace

std::string to_u_string(const UExpr& f) {
    std::vector<std::pair<double, std::vector<std::string>>> parts;
    for (const auto& t : f) {
        std::vector<std::string> factors;
        if (t.upow == 1) factors.emplace_back("u");
        if (t.upow > 1) factors.push_back("u^" + std::to_string(t.upow));
        if (t.erate != 0.0) factors.push_back("e^{" + rate_times(t.erate, "u") + "}");
        if (t.trig != Trig::None) {
            factors.push_back(std::string(to_string(t.trig)) + "(" + rate_times(t.tfreq, "u") + ")");
        }
        parts.emplace_back(t.coeff, std::move(factors));
    }
    return join_terms(parts, true);
}

std::string to_t_string(const UExpr& f, const SubstMap& subst) {
    const double a = subst.alpha();
    const std::string ta = "t^" + format_real(a);
    std::vector<std::pair<double, std::vector<std::string>>> parts;
    for (const auto& t : f) {
        std::vector<std::string> factors;
        if (t.upow > 0) factors.push_back("t^" + format_real(a * t.upow));
        if (t.erate != 0.0) factors.push_back("e^{" + format_real(t.erate / a) + "·" + ta + "}");
        if (t.trig != Trig::None) {
            factors.push_back(std::string(to_string(t.trig)) + "(" + format_real(t.tfreq / a) + "·" +
                              ta + ")");
        }
        parts.emplace_back(t.coeff / std::pow(a, t.upow), std::move(factors));
    }
    return join_terms(parts, false);
}

}  // namespace cfde
