#pragma once

// Spin-graph data model: weighted interaction graphs with local fields and
// directed bond phases (threaded flux), plus the canonical chain/ring families.
//
// Conventions used throughout the library:
//   * sites are 0-based,
//   * hbar = 1, couplings and fields are in units of J, time in units of 1/J,
//   * a bond stored as (i, j, phase) carries phase(i->j) = phase and
//     phase(j->i) = -phase.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spinbus/error.hpp"

namespace spinbus {

using SiteId = std::size_t;

enum class Model { XY, Heisenberg };

struct Bond {
    SiteId i = 0;
    SiteId j = 0;
    double coupling = 0.0;
    double phase = 0.0;  // radians, directed i -> j

    friend bool operator==(const Bond&, const Bond&) = default;
};

class SpinGraph {
public:
    SpinGraph(Model model, std::vector<double> fields, std::vector<Bond> bonds)
        : model_(model), fields_(std::move(fields)), bonds_(std::move(bonds)) {
        validate();
    }

    [[nodiscard]] Model model() const noexcept { return model_; }
    [[nodiscard]] std::size_t n_sites() const noexcept { return fields_.size(); }
    [[nodiscard]] std::span<const double> fields() const noexcept { return fields_; }
    [[nodiscard]] double field(SiteId i) const { return fields_.at(i); }
    [[nodiscard]] std::span<const Bond> bonds() const noexcept { return bonds_; }

    /// Bond between i and j oriented as i -> j (phase negated if stored reversed).
    [[nodiscard]] std::optional<Bond> bond_between(SiteId i, SiteId j) const {
        for (const auto& b : bonds_) {
            if (b.i == i && b.j == j) return b;
            if (b.i == j && b.j == i) return Bond{i, j, b.coupling, -b.phase};
        }
        return std::nullopt;
    }

    [[nodiscard]] std::vector<SiteId> neighbors(SiteId i) const {
        std::vector<SiteId> out;
        for (const auto& b : bonds_) {
            if (b.i == i) out.push_back(b.j);
            else if (b.j == i) out.push_back(b.i);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const SpinGraph&, const SpinGraph&) = default;

private:
    void validate() const {
        const std::size_t n = fields_.size();
        if (n == 0) throw Error(ErrorKind::InvalidSize, "graph must have at least one site");
        for (double b : fields_) {
            if (!std::isfinite(b)) throw Error(ErrorKind::Validation, "site fields must be finite");
        }
        for (std::size_t k = 0; k < bonds_.size(); ++k) {
            const auto& b = bonds_[k];
            if (b.i >= n || b.j >= n) {
                throw Error(ErrorKind::Validation,
                            "bond (" + std::to_string(b.i) + "," + std::to_string(b.j) +
                                ") references a site outside [0, " + std::to_string(n) + ")");
            }
            if (b.i == b.j) {
                throw Error(ErrorKind::Validation,
                            "self-loop bond on site " + std::to_string(b.i) + " (bond endpoints must differ)");
            }
            if (!std::isfinite(b.coupling) || !std::isfinite(b.phase)) {
                throw Error(ErrorKind::Validation, "bond coupling and phase must be finite");
            }
            for (std::size_t l = 0; l < k; ++l) {
                const auto& o = bonds_[l];
                if ((o.i == b.i && o.j == b.j) || (o.i == b.j && o.j == b.i)) {
                    throw Error(ErrorKind::Validation,
                                "duplicate bond between sites " + std::to_string(b.i) + " and " +
                                    std::to_string(b.j) + " (at most one bond per pair)");
                }
            }
        }
    }

    Model model_;
    std::vector<double> fields_;
    std::vector<Bond> bonds_;
};

/// Per-site gauge phases chi_i (radians).
struct GaugePhases {
    std::vector<double> chi;
};

inline SpinGraph make_chain(std::size_t n, double coupling, std::vector<double> fields,
                            Model model = Model::XY) {
    if (n == 0) throw Error(ErrorKind::InvalidSize, "chain needs n >= 1");
    if (fields.size() != n) {
        throw Error(ErrorKind::InvalidInput, "chain fields length " + std::to_string(fields.size()) +
                                                 " does not match n = " + std::to_string(n));
    }
    std::vector<Bond> bonds;
    for (SiteId k = 0; k + 1 < n; ++k) bonds.push_back({k, k + 1, coupling, 0.0});
    return SpinGraph(model, std::move(fields), std::move(bonds));
}

inline SpinGraph make_chain(std::size_t n, double coupling) {
    return make_chain(n, coupling, std::vector<double>(n, 0.0));
}

/// Open chain with per-bond couplings; couplings.size() + 1 sites.
inline SpinGraph make_chain(std::span<const double> couplings, std::vector<double> fields,
                            Model model = Model::XY) {
    const std::size_t n = couplings.size() + 1;
    if (fields.size() != n) throw Error(ErrorKind::InvalidInput, "chain fields length mismatch");
    std::vector<Bond> bonds;
    for (SiteId k = 0; k + 1 < n; ++k) bonds.push_back({k, k + 1, couplings[k], 0.0});
    return SpinGraph(model, std::move(fields), std::move(bonds));
}

/// Ring threaded by `flux` quanta in the uniform gauge: every bond k -> k+1
/// carries 2*pi*flux/n.
inline SpinGraph make_ring(std::size_t n, double coupling, double flux, Model model = Model::XY) {
    if (n < 3) throw Error(ErrorKind::InvalidSize, "ring needs n >= 3");
    const double theta = 2.0 * std::numbers::pi * flux / static_cast<double>(n);
    std::vector<Bond> bonds;
    for (SiteId k = 0; k < n; ++k) bonds.push_back({k, (k + 1) % n, coupling, theta});
    return SpinGraph(model, std::vector<double>(n, 0.0), std::move(bonds));
}

/// phase(i->j) -> phase(i->j) + chi_j - chi_i. Loop sums are unchanged.
inline SpinGraph gauge_transform(const SpinGraph& g, const GaugePhases& gauge) {
    if (gauge.chi.size() != g.n_sites()) {
        throw Error(ErrorKind::InvalidInput, "gauge length " + std::to_string(gauge.chi.size()) +
                                                 " does not match n_sites " + std::to_string(g.n_sites()));
    }
    std::vector<Bond> bonds(g.bonds().begin(), g.bonds().end());
    for (auto& b : bonds) b.phase += gauge.chi[b.j] - gauge.chi[b.i];
    return SpinGraph(g.model(), std::vector<double>(g.fields().begin(), g.fields().end()), std::move(bonds));
}

/// Total directed phase around a closed walk v0 -> v1 -> ... -> v0.
inline double cycle_phase(const SpinGraph& g, std::span<const SiteId> cycle) {
    double total = 0.0;
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        const SiteId a = cycle[k];
        const SiteId b = cycle[(k + 1) % cycle.size()];
        auto bond = g.bond_between(a, b);
        if (!bond) throw Error(ErrorKind::InvalidInput, "cycle uses a missing bond");
        total += bond->phase;
    }
    return total;
}

/// Graph with `b`'s sites appended after `a`'s. Both must share a model.
inline SpinGraph disjoint_union(const SpinGraph& a, const SpinGraph& b) {
    if (a.model() != b.model()) throw Error(ErrorKind::InvalidInput, "disjoint_union needs matching models");
    std::vector<double> fields(a.fields().begin(), a.fields().end());
    fields.insert(fields.end(), b.fields().begin(), b.fields().end());
    std::vector<Bond> bonds(a.bonds().begin(), a.bonds().end());
    const std::size_t off = a.n_sites();
    for (auto bond : b.bonds()) {
        bond.i += off;
        bond.j += off;
        bonds.push_back(bond);
    }
    return SpinGraph(a.model(), std::move(fields), std::move(bonds));
}

/// Connected-component label per site, labels numbered by first appearance.
inline std::vector<std::size_t> component_labels(const SpinGraph& g) {
    const std::size_t n = g.n_sites();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& b : g.bonds()) {
        const auto ri = find(b.i), rj = find(b.j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
    }
    std::vector<std::size_t> label(n), root_label(n, n);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = find(i);
        if (root_label[r] == n) root_label[r] = next++;
        label[i] = root_label[r];
    }
    return label;
}

}  // namespace spinbus
