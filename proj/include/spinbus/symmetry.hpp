#pragma once

// Mirror (involutive) symmetries of spin graphs and the two symmetry classes
// of (encoded sites, target pair) configurations:
//
//   class I  - an involution fixes mu and swaps m <-> n, so |f_m,mu| = |f_n,mu|
//              and the best entanglement comes from exciting mu alone;
//              C_max ~ 2 |f_m,mu(t*)|^2.
//   class II - an involution swaps mu <-> nu and m <-> n, so f_m,nu = f_n,mu and
//              f_m,mu = f_n,nu; the best encoding is maximally entangled;
//              C_max ~ |f_m,mu(t*)|^2.
//
// An involution p must map the one-excitation Hamiltonian onto itself,
// H_p(i)p(j) = H_ij. A reflection of a ring threaded by flux reverses the
// flux and so is not a symmetry.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spinbus/dynamics.hpp"
#include "spinbus/error.hpp"
#include "spinbus/graph.hpp"
#include "spinbus/hamiltonian.hpp"

namespace spinbus {

inline constexpr std::size_t kExhaustiveSymmetryMaxSites = 16;
inline constexpr double kSymmetryTolerance = 1e-12;

using SitePairSet = std::vector<std::pair<SiteId, SiteId>>;

struct Involution {
    std::vector<SiteId> permutation;
    std::vector<SiteId> fixed_sites;
    SitePairSet swap_pairs;  // (a, b) with a < b, ascending

    [[nodiscard]] bool is_identity() const { return swap_pairs.empty(); }
    [[nodiscard]] bool fixes(SiteId s) const { return permutation.at(s) == s; }
    [[nodiscard]] bool swaps(SiteId a, SiteId b) const { return a != b && permutation.at(a) == b; }

    /// Cycle notation such as "(0 4)(1 3)"; the identity prints as "()".
    [[nodiscard]] std::string cycle_notation() const {
        if (swap_pairs.empty()) return "()";
        std::string s;
        for (const auto& [a, b] : swap_pairs) s += "(" + std::to_string(a) + " " + std::to_string(b) + ")";
        return s;
    }

    static Involution from_permutation(std::vector<SiteId> perm) {
        Involution inv;
        for (SiteId i = 0; i < perm.size(); ++i) {
            if (perm[i] == i) inv.fixed_sites.push_back(i);
            else if (perm[i] > i) inv.swap_pairs.emplace_back(i, perm[i]);
        }
        inv.permutation = std::move(perm);
        return inv;
    }
};

namespace detail {

inline double structure_scale(const Eigen::MatrixXcd& h) { return std::max(1.0, h.cwiseAbs().maxCoeff()); }

inline bool entries_match(const Eigen::MatrixXcd& h, SiteId i, SiteId k, SiteId pi, SiteId pk, double tol) {
    const Complex want = h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    const Complex got = h(static_cast<Eigen::Index>(pi), static_cast<Eigen::Index>(pk));
    return std::abs(got - want) <= tol;
}

inline bool maps_onto_itself(const Eigen::MatrixXcd& h, const std::vector<SiteId>& perm) {
    const double tol = kSymmetryTolerance * structure_scale(h);
    for (SiteId i = 0; i < perm.size(); ++i) {
        for (SiteId k = 0; k < perm.size(); ++k) {
            if (!entries_match(h, i, k, perm[i], perm[k], tol)) return false;
        }
    }
    return true;
}

/// Depth-first enumeration; the first unassigned site is fixed or paired with
/// a later site, in ascending order, so output is lexicographic.
class InvolutionSearch {
public:
    explicit InvolutionSearch(const Eigen::MatrixXcd& h)
        : h_(h), tol_(kSymmetryTolerance * structure_scale(h)),
          n_(static_cast<SiteId>(h.rows())), perm_(n_, kUnset) {}

    std::vector<std::vector<SiteId>> run() {
        extend(0);
        return std::move(found_);
    }

private:
    static constexpr SiteId kUnset = static_cast<SiteId>(-1);

    bool consistent(SiteId s) const {
        for (SiteId k = 0; k < n_; ++k) {
            if (perm_[k] == kUnset) continue;
            if (!entries_match(h_, s, k, perm_[s], perm_[k], tol_)) return false;
            if (!entries_match(h_, k, s, perm_[k], perm_[s], tol_)) return false;
        }
        return true;
    }

    void extend(SiteId from) {
        SiteId i = from;
        while (i < n_ && perm_[i] != kUnset) ++i;
        if (i == n_) {
            found_.push_back(perm_);
            return;
        }
        perm_[i] = i;
        if (consistent(i)) extend(i + 1);
        perm_[i] = kUnset;

        for (SiteId j = i + 1; j < n_; ++j) {
            if (perm_[j] != kUnset) continue;
            perm_[i] = j;
            perm_[j] = i;
            if (consistent(i) && consistent(j)) extend(i + 1);
            perm_[i] = kUnset;
            perm_[j] = kUnset;
        }
    }

    const Eigen::MatrixXcd& h_;
    double tol_;
    SiteId n_;
    std::vector<SiteId> perm_;
    std::vector<std::vector<SiteId>> found_;
};

/// Site order around the cycle if g is a single ring with uniform couplings
/// and fields, else empty.
inline std::vector<SiteId> uniform_ring_order(const SpinGraph& g) {
    const std::size_t n = g.n_sites();
    if (n < 3 || g.bonds().size() != n) return {};
    const double J = g.bonds().front().coupling;
    for (const auto& b : g.bonds()) {
        if (b.coupling != J) return {};
    }
    for (double f : g.fields()) {
        if (f != g.field(0)) return {};
    }
    std::vector<SiteId> order{0};
    std::vector<bool> seen(n, false);
    seen[0] = true;
    for (SiteId k = 0; k < n; ++k) {
        if (g.neighbors(k).size() != 2) return {};
    }
    SiteId cur = 0;
    while (order.size() < n) {
        const auto nb = g.neighbors(cur);
        const SiteId next = !seen[nb[0]] ? nb[0] : nb[1];
        if (seen[next]) return {};
        seen[next] = true;
        order.push_back(next);
        cur = next;
    }
    return order;
}

}  // namespace detail

/// All permutations p with p o p = id that preserve the weighted structure,
/// identity included, sorted lexicographically by image.
inline std::vector<Involution> find_involutions(const SpinGraph& g) {
    const Eigen::MatrixXcd h = build_single_excitation(g).matrix;
    const std::size_t n = g.n_sites();

    std::vector<std::vector<SiteId>> candidates;
    if (n <= kExhaustiveSymmetryMaxSites) {
        candidates = detail::InvolutionSearch(h).run();
    } else {
        const auto order = detail::uniform_ring_order(g);
        if (order.empty()) {
            throw Error(ErrorKind::Resource, "exhaustive involution search is limited to " +
                                                 std::to_string(kExhaustiveSymmetryMaxSites) +
                                                 " sites and the graph is not a uniform ring");
        }
        std::vector<SiteId> pos(n);
        for (SiteId k = 0; k < n; ++k) pos[order[k]] = k;
        std::vector<SiteId> ident(n);
        for (SiteId k = 0; k < n; ++k) ident[k] = k;
        candidates.push_back(ident);
        for (SiteId c = 0; c < n; ++c) {
            std::vector<SiteId> perm(n);
            for (SiteId s = 0; s < n; ++s) perm[s] = order[(c + n - pos[s]) % n];
            candidates.push_back(std::move(perm));
        }
        if (n % 2 == 0) {
            std::vector<SiteId> perm(n);
            for (SiteId s = 0; s < n; ++s) perm[s] = order[(pos[s] + n / 2) % n];
            candidates.push_back(std::move(perm));
        }
    }

    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::vector<Involution> out;
    for (auto& perm : candidates) {
        if (detail::maps_onto_itself(h, perm)) out.push_back(Involution::from_permutation(std::move(perm)));
    }
    return out;
}

enum class SymmetryClass { ClassI, ClassII, None };

constexpr const char* to_string(SymmetryClass c) {
    switch (c) {
        case SymmetryClass::ClassI: return "class-I";
        case SymmetryClass::ClassII: return "class-II";
        case SymmetryClass::None: return "none";
    }
    return "none";
}

struct SymmetryClassification {
    SymmetryClass kind = SymmetryClass::None;
    std::optional<Involution> witness;
    SiteId mu = 0;
    std::optional<SiteId> nu;
    SiteId m = 0;
    SiteId n = 0;
};

/// Class I if an involution fixes mu and swaps m <-> n; otherwise class II if
/// one swaps mu <-> nu and m <-> n; otherwise None. Class I wins ties.
inline SymmetryClassification classify(const SpinGraph& g, SiteId mu, std::optional<SiteId> nu, SiteId m, SiteId n,
                                       const std::vector<Involution>& involutions) {
    const std::size_t N = g.n_sites();
    if (m == n) throw Error(ErrorKind::InvalidTarget, "target sites must differ");
    if (mu >= N || m >= N || n >= N || (nu && *nu >= N)) {
        throw Error(ErrorKind::InvalidInput, "site outside the graph");
    }
    SymmetryClassification out{SymmetryClass::None, std::nullopt, mu, nu, m, n};
    for (const auto& inv : involutions) {
        if (inv.fixes(mu) && inv.swaps(m, n)) {
            out.kind = SymmetryClass::ClassI;
            out.witness = inv;
            return out;
        }
    }
    if (nu && *nu != mu) {
        for (const auto& inv : involutions) {
            if (inv.swaps(mu, *nu) && inv.swaps(m, n)) {
                out.kind = SymmetryClass::ClassII;
                out.witness = inv;
                return out;
            }
        }
    }
    return out;
}

inline SymmetryClassification classify(const SpinGraph& g, SiteId mu, std::optional<SiteId> nu, SiteId m,
                                       SiteId n) {
    return classify(g, mu, nu, m, n, find_involutions(g));
}

struct CmaxPrediction {
    double predicted = 0.0;
    double amplitude = 0.0;  // |f_m,mu(t*)|
    double t_star = 0.0;
    std::optional<double> cross_m;  // |f_m,nu(t*)|
    std::optional<double> cross_n;  // |f_n,nu(t*)|
};

inline CmaxPrediction predicted_cmax(const SymmetryClassification& cls, const Propagator& p, double t_star) {
    if (cls.kind == SymmetryClass::None) {
        throw Error(ErrorKind::InvalidClassification, "no symmetry class, nothing to predict");
    }
    CmaxPrediction out;
    out.t_star = t_star;
    out.amplitude = std::abs(p.amplitude(cls.m, cls.mu, t_star));
    const double a2 = out.amplitude * out.amplitude;
    out.predicted = cls.kind == SymmetryClass::ClassI ? 2.0 * a2 : a2;
    if (cls.nu) {
        out.cross_m = std::abs(p.amplitude(cls.m, *cls.nu, t_star));
        out.cross_n = std::abs(p.amplitude(cls.n, *cls.nu, t_star));
    }
    return out;
}

/// Counterpart pairs reachable from mu through class-I symmetry: the union of
/// the swap pairs of every involution that fixes mu.
inline SitePairSet counterpart_coverage(const std::vector<Involution>& involutions, SiteId mu) {
    std::set<std::pair<SiteId, SiteId>> pairs;
    for (const auto& inv : involutions) {
        if (!inv.fixes(mu)) continue;
        pairs.insert(inv.swap_pairs.begin(), inv.swap_pairs.end());
    }
    return {pairs.begin(), pairs.end()};
}

inline SitePairSet counterpart_coverage(const SpinGraph& g, SiteId mu) {
    if (mu >= g.n_sites()) throw Error(ErrorKind::InvalidInput, "site outside the graph");
    return counterpart_coverage(find_involutions(g), mu);
}

}  // namespace spinbus
