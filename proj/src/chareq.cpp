#include "cfde/chareq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cfde/ualgebra.hpp"

namespace cfde {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIterations = 200;
constexpr double kUpdateTol = 1e-13;
constexpr double kClusterRadius = 1e-6;
// Clusters up to this far apart are merged only when the merged multiplicity
// passes the derivative-vanishing test at the refined cluster centre.
constexpr double kCandidateRadius = 1e-4;
constexpr double kImagSnap = 1e-8;
constexpr double kReconstructTol = 1e-8;

std::string describe(const CharPoly& p) {
    std::ostringstream os;
    os << "r^" << p.degree();
    for (int i = p.degree() - 1; i >= 0; --i) {
        const double c = p.coeff(i);
        if (c == 0.0) continue;
        os << (c < 0 ? " - " : " + ") << format_real(std::abs(c));
        if (i > 0) os << "·r" << (i > 1 ? "^" + std::to_string(i) : "");
    }
    return os.str();
}

// Coefficients of the order-th derivative, index i -> r^i.
std::vector<double> derivative_coeffs(const CharPoly& p, int order) {
    const int n = p.degree();
    std::vector<double> d;
    for (int i = 0; i + order <= n; ++i) {
        double c = p.coeff(i + order);
        for (int k = 1; k <= order; ++k) c *= static_cast<double>(i + k);
        d.push_back(c);
    }
    return d;
}

Complex horner(const std::vector<double>& c, Complex r) {
    Complex acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + *it;
    return acc;
}

double abs_bound(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + std::abs(*it);
    return acc;
}

// Newton on P^{(m-1)}, for which a root of multiplicity m is simple.
Complex refine(const CharPoly& p, Complex z0, int m) {
    const auto f = derivative_coeffs(p, m - 1);
    const auto fp = derivative_coeffs(p, m);
    Complex z = z0;
    for (int it = 0; it < 50; ++it) {
        const Complex d = horner(fp, z);
        if (d == 0.0) break;
        const Complex step = horner(f, z) / d;
        z -= step;
        if (std::abs(step) <= 4.0 * kEps * std::max(1.0, std::abs(z))) break;
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
        std::abs(z - z0) > 1e-3 * (1.0 + std::abs(z0))) {
        return z0;
    }
    return z;
}

bool vanishing_derivatives(const CharPoly& p, Complex z, int m) {
    for (int j = 0; j < m - 1; ++j) {
        const auto c = derivative_coeffs(p, j);
        if (std::abs(horner(c, z)) > 1e3 * kEps * abs_bound(c, std::abs(z))) return false;
    }
    return true;
}

struct Cluster {
    std::vector<Complex> members;

    Complex mean() const {
        Complex s = std::accumulate(members.begin(), members.end(), Complex(0.0));
        return s / static_cast<double>(members.size());
    }
};

std::vector<Cluster> cluster_roots(const CharPoly& p, const std::vector<Complex>& z) {
    const std::size_t n = z.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double scale = 1.0 + std::max(std::abs(z[i]), std::abs(z[j]));
            if (std::abs(z[i] - z[j]) <= kClusterRadius * scale) parent[find(i)] = find(j);
        }
    }
    std::vector<Cluster> clusters;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(clusters.size());
            clusters.emplace_back();
        }
        clusters[static_cast<std::size_t>(slot[r])].members.push_back(z[i]);
    }

    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t a = 0; a < clusters.size() && !merged; ++a) {
            for (std::size_t b = a + 1; b < clusters.size() && !merged; ++b) {
                const Complex ma = clusters[a].mean();
                const Complex mb = clusters[b].mean();
                if (std::abs(ma - mb) > kCandidateRadius * (1.0 + std::abs(ma))) continue;
                Cluster joint = clusters[a];
                joint.members.insert(joint.members.end(), clusters[b].members.begin(),
                                     clusters[b].members.end());
                const int m = static_cast<int>(joint.members.size());
                Complex centre = refine(p, joint.mean(), m);
                if (std::abs(centre.imag()) < kImagSnap * (1.0 + std::abs(centre))) {
                    centre = refine(p, Complex(centre.real(), 0.0), m);
                }
                if (vanishing_derivatives(p, centre, m)) {
                    clusters[a] = std::move(joint);
                    clusters.erase(clusters.begin() + static_cast<long>(b));
                    merged = true;
                }
            }
        }
    }
    return clusters;
}

}  // namespace

CharPoly::CharPoly(std::vector<double> lower) : lower_(std::move(lower)) {
    if (lower_.empty()) throw std::invalid_argument("characteristic polynomial needs degree >= 1");
    for (double c : lower_) {
        if (!std::isfinite(c)) throw std::invalid_argument("non-finite polynomial coefficient");
    }
}

double CharPoly::scale() const noexcept {
    double s = 1.0;
    for (double c : lower_) s = std::max(s, std::abs(c));
    return s;
}

int RootSet::total_multiplicity() const noexcept {
    int s = 0;
    for (const auto& e : entries) s += e.multiplicity;
    return s;
}

Complex eval_poly(const CharPoly& p, Complex r) { return eval_poly_deriv(p, r, 0); }

Complex eval_poly_deriv(const CharPoly& p, Complex r, int order) {
    if (order < 0) throw std::invalid_argument("eval_poly_deriv: negative order");
    if (order > p.degree()) return 0.0;
    return horner(derivative_coeffs(p, order), r);
}

namespace detail {

std::vector<Complex> aberth_iterates(const CharPoly& p) {
    const int n = p.degree();
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) c[static_cast<std::size_t>(i)] = p.coeff(i);
    const auto dc = derivative_coeffs(p, 1);

    const double radius = 1.0 + p.scale();
    std::vector<Complex> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / n + 0.4;
        z[static_cast<std::size_t>(k)] = std::polar(radius, angle);
    }
    std::vector<bool> done(z.size(), false);

    for (int it = 0; it < kMaxIterations; ++it) {
        bool all_done = true;
        for (std::size_t k = 0; k < z.size(); ++k) {
            if (done[k]) continue;
            const Complex pv = horner(c, z[k]);
            if (std::abs(pv) <= 4.0 * kEps * abs_bound(c, std::abs(z[k]))) {
                done[k] = true;
                continue;
            }
            Complex dv = horner(dc, z[k]);
            if (dv == 0.0) dv = kEps;
            const Complex w = pv / dv;
            Complex s = 0.0;
            for (std::size_t j = 0; j < z.size(); ++j) {
                if (j != k && z[j] != z[k]) s += 1.0 / (z[k] - z[j]);
            }
            const Complex step = w / (1.0 - w * s);
            z[k] -= step;
            if (std::abs(step) < kUpdateTol * (1.0 + std::abs(z[k]))) {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if (all_done) return z;
    }
    if (std::all_of(done.begin(), done.end(), [](bool b) { return b; })) return z;
    throw RootFindingError("root finder did not converge in " + std::to_string(kMaxIterations) +
                           " iterations for " + describe(p));
}

}  // namespace detail

RootSet find_roots(const CharPoly& p) {
    const auto iterates = detail::aberth_iterates(p);
    auto clusters = cluster_roots(p, iterates);

    std::vector<RootEntry> real_roots;
    std::vector<RootEntry> upper;
    std::vector<RootEntry> lower;
    for (const auto& cl : clusters) {
        const int m = static_cast<int>(cl.members.size());
        Complex z = refine(p, cl.mean(), m);
        if (std::abs(z.imag()) < kImagSnap * (1.0 + std::abs(z))) {
            z = refine(p, Complex(z.real(), 0.0), m);
            real_roots.push_back({Complex(z.real(), 0.0), m});
        } else if (z.imag() > 0) {
            upper.push_back({z, m});
        } else {
            lower.push_back({z, m});
        }
    }

    if (upper.size() != lower.size()) {
        throw RootFindingError("complex roots are not closed under conjugation for " +
                               describe(p));
    }
    RootSet out;
    out.entries = real_roots;
    std::vector<bool> used(lower.size(), false);
    for (const auto& e : upper) {
        std::size_t best = lower.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < lower.size(); ++j) {
            if (used[j] || lower[j].multiplicity != e.multiplicity) continue;
            const double d = std::abs(lower[j].root - std::conj(e.root));
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best == lower.size() || best_dist > kCandidateRadius * (1.0 + std::abs(e.root))) {
            throw RootFindingError("unpaired complex root while solving " + describe(p));
        }
        used[best] = true;
        const Complex avg = 0.5 * (e.root + std::conj(lower[best].root));
        out.entries.push_back({avg, e.multiplicity});
        out.entries.push_back({std::conj(avg), e.multiplicity});
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const RootEntry& a, const RootEntry& b) {
        if (a.root.real() != b.root.real()) return a.root.real() < b.root.real();
        return a.root.imag() < b.root.imag();
    });

    const auto rebuilt = expand_roots(out);
    for (int i = 0; i < p.degree(); ++i) {
        if (std::abs(rebuilt[static_cast<std::size_t>(i)] - p.coeff(i)) >
            kReconstructTol * p.scale()) {
            throw RootFindingError("root set does not reproduce the coefficients of " +
                                   describe(p));
        }
    }
    return out;
}

std::vector<double> expand_roots(const RootSet& roots) {
    std::vector<Complex> poly{1.0};  // index i -> r^i
    for (const auto& e : roots.entries) {
        for (int m = 0; m < e.multiplicity; ++m) {
            std::vector<Complex> next(poly.size() + 1, 0.0);
            for (std::size_t i = 0; i < poly.size(); ++i) {
                next[i + 1] += poly[i];
                next[i] -= e.root * poly[i];
            }
            poly = std::move(next);
        }
    }
    std::vector<double> lower;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) lower.push_back(poly[i].real());
    return lower;
}

}  // namespace cfde
