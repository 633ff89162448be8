#pragma once

// JSON graph documents:
//
//   { "model": "xy" | "heisenberg",
//     "sites": [ {"id": 0, "field": 0.0}, ... ],
//     "bonds": [ {"i": 0, "j": 1, "J": 1.0, "phase": 0.0}, ... ] }
//
// or a shorthand in place of sites/bonds:
//
//   "chain": {"n": 5, "J": 1.0}
//   "ring":  {"n": 5, "J": 1.0, "flux": 0.3}
//
// Omitted "field"/"phase"/"flux" default to 0; omitted "model" means xy.
// A shorthand may still carry a "sites" list to set local fields.

#include <string>
#include <string_view>

#include <json.hpp>

#include "spinbus/error.hpp"
#include "spinbus/graph.hpp"

namespace spinbus {

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) throw Error(ErrorKind::Parse, ctx + ": missing field \"" + key + "\"");
    return *it;
}

inline double as_real(const nlohmann::json& v, const std::string& ctx) {
    if (!v.is_number()) throw Error(ErrorKind::Parse, ctx + ": expected a number");
    return v.get<double>();
}

inline std::size_t as_index(const nlohmann::json& v, const std::string& ctx) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer()) {
        throw Error(ErrorKind::Validation, ctx + ": site id must be non-negative");
    }
    throw Error(ErrorKind::Parse, ctx + ": expected a non-negative integer");
}

inline double optional_real(const nlohmann::json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    return it == obj.end() ? 0.0 : as_real(*it, ctx + "." + key);
}

}  // namespace detail

inline SpinGraph parse_graph_json(const nlohmann::json& doc) {
    using detail::as_index;
    using detail::as_real;
    using detail::optional_real;
    using detail::require;

    if (!doc.is_object()) throw Error(ErrorKind::Parse, "graph document must be a JSON object");

    Model model = Model::XY;
    if (auto it = doc.find("model"); it != doc.end()) {
        if (!it->is_string()) throw Error(ErrorKind::Parse, "model: expected a string");
        const auto s = it->get<std::string>();
        if (s == "xy") model = Model::XY;
        else if (s == "heisenberg") model = Model::Heisenberg;
        else throw Error(ErrorKind::Parse, "model: unknown model \"" + s + "\" (expected xy or heisenberg)");
    }

    const bool has_chain = doc.contains("chain");
    const bool has_ring = doc.contains("ring");
    if (has_chain && has_ring) throw Error(ErrorKind::Validation, "chain and ring shorthands are exclusive");
    if ((has_chain || has_ring) && doc.contains("bonds")) {
        throw Error(ErrorKind::Validation, "a shorthand cannot be combined with an explicit bonds list");
    }

    std::optional<SpinGraph> base;
    if (has_chain || has_ring) {
        const char* key = has_chain ? "chain" : "ring";
        const auto& sh = doc.at(key);
        if (!sh.is_object()) throw Error(ErrorKind::Parse, std::string(key) + ": expected an object");
        const auto n = as_index(require(sh, "n", key), std::string(key) + ".n");
        const double J = as_real(require(sh, "J", key), std::string(key) + ".J");
        if (has_chain) {
            base = make_chain(n, J, std::vector<double>(n, 0.0), model);
        } else {
            base = make_ring(n, J, optional_real(sh, "flux", key), model);
        }
    }

    std::vector<double> fields;
    if (auto it = doc.find("sites"); it != doc.end()) {
        if (!it->is_array()) throw Error(ErrorKind::Parse, "sites: expected an array");
        const std::size_t n = it->size();
        fields.assign(n, 0.0);
        std::vector<bool> seen(n, false);
        for (std::size_t k = 0; k < n; ++k) {
            const auto ctx = "sites[" + std::to_string(k) + "]";
            const auto& s = (*it)[k];
            if (!s.is_object()) throw Error(ErrorKind::Parse, ctx + ": expected an object");
            const auto id = as_index(require(s, "id", ctx), ctx + ".id");
            if (id >= n) {
                throw Error(ErrorKind::Validation, ctx + ".id: " + std::to_string(id) + " outside [0, " +
                                                       std::to_string(n) + ")");
            }
            if (seen[id]) throw Error(ErrorKind::Validation, ctx + ".id: duplicate site id " + std::to_string(id));
            seen[id] = true;
            fields[id] = optional_real(s, "field", ctx);
        }
    }

    if (base) {
        if (fields.empty()) return *base;
        if (fields.size() != base->n_sites()) {
            throw Error(ErrorKind::Validation, "sites list length does not match shorthand n");
        }
        return SpinGraph(model, std::move(fields), std::vector<Bond>(base->bonds().begin(), base->bonds().end()));
    }

    if (fields.empty()) throw Error(ErrorKind::Parse, "document needs \"sites\" or a chain/ring shorthand");

    std::vector<Bond> bonds;
    if (auto it = doc.find("bonds"); it != doc.end()) {
        if (!it->is_array()) throw Error(ErrorKind::Parse, "bonds: expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const auto ctx = "bonds[" + std::to_string(k) + "]";
            const auto& b = (*it)[k];
            if (!b.is_object()) throw Error(ErrorKind::Parse, ctx + ": expected an object");
            bonds.push_back({as_index(require(b, "i", ctx), ctx + ".i"), as_index(require(b, "j", ctx), ctx + ".j"),
                             as_real(require(b, "J", ctx), ctx + ".J"), optional_real(b, "phase", ctx)});
        }
    }
    return SpinGraph(model, std::move(fields), std::move(bonds));
}

inline SpinGraph parse_graph(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Parse, e.what());
    }
    return parse_graph_json(doc);
}

/// Explicit (non-shorthand) document; parse_graph(graph_to_json(g)) == g.
inline nlohmann::json graph_to_json(const SpinGraph& g) {
    nlohmann::json doc;
    doc["model"] = g.model() == Model::XY ? "xy" : "heisenberg";
    auto sites = nlohmann::json::array();
    for (SiteId i = 0; i < g.n_sites(); ++i) sites.push_back({{"id", i}, {"field", g.field(i)}});
    doc["sites"] = std::move(sites);
    auto bonds = nlohmann::json::array();
    for (const auto& b : g.bonds()) {
        bonds.push_back({{"i", b.i}, {"j", b.j}, {"J", b.coupling}, {"phase", b.phase}});
    }
    doc["bonds"] = std::move(bonds);
    return doc;
}

}  // namespace spinbus
