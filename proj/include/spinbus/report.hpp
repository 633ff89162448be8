#pragma once

// JSON forms of result structures. Reals are rounded to 12 significant
// digits on the way out; parsing a report back yields the rounded values,
// so to_json(from_json(j)) == j.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinbus/entanglement.hpp"
#include "spinbus/format.hpp"
#include "spinbus/optimizer.hpp"
#include "spinbus/symmetry.hpp"

namespace spinbus {

using nlohmann::json;

inline json real_json(double x) { return round_significant(x); }

inline json complex_json(Complex z) { return {{"re", real_json(z.real())}, {"im", real_json(z.imag())}}; }

inline Complex complex_from_json(const json& j) { return {j.at("re").get<double>(), j.at("im").get<double>()}; }

// EncodingOptimum ------------------------------------------------------------

inline void to_json(json& j, const EncodingOptimum& e) {
    j = {{"alpha", complex_json(e.alpha)},
         {"beta", complex_json(e.beta)},
         {"C", real_json(e.C)},
         {"t", real_json(e.t)},
         {"method", to_string(e.method)}};
}

inline void from_json(const json& j, EncodingOptimum& e) {
    e.alpha = complex_from_json(j.at("alpha"));
    e.beta = complex_from_json(j.at("beta"));
    e.C = j.at("C").get<double>();
    e.t = j.at("t").get<double>();
    const auto m = j.at("method").get<std::string>();
    if (m == "closed-form") e.method = OptimumMethod::ClosedForm;
    else if (m == "grid-search") e.method = OptimumMethod::GridSearch;
    else throw Error(ErrorKind::Parse, "method: unknown optimum method \"" + m + "\"");
}

// FluxTransferResult ---------------------------------------------------------

inline void to_json(json& j, const FluxTransferResult& r) {
    j = {{"flux", real_json(r.flux)},
         {"t", real_json(r.t)},
         {"amplitude", real_json(r.amplitude)},
         {"probability", real_json(r.probability)}};
}

inline void from_json(const json& j, FluxTransferResult& r) {
    r.flux = j.at("flux").get<double>();
    r.t = j.at("t").get<double>();
    r.amplitude = j.at("amplitude").get<double>();
    r.probability = j.at("probability").get<double>();
}

// TargetPlan -----------------------------------------------------------------

inline void to_json(json& j, const TargetPlan& p) {
    auto stages = json::array();
    for (const auto& s : p.stages) stages.push_back({{"flux", real_json(s.flux)}, {"duration", real_json(s.duration)}});
    j = {{"ring_sites", p.ring_sites},
         {"coupling", real_json(p.coupling)},
         {"stages", std::move(stages)},
         {"encoding", {{"mu", p.encoded_site}, {"alpha", complex_json(1.0)}, {"beta", complex_json(0.0)}}},
         {"relay_site", p.relay_site},
         {"transfer_amplitude", real_json(p.transfer_amplitude)},
         {"target", {p.m, p.n}},
         {"achieved_C", real_json(p.achieved_C)}};
}

inline void from_json(const json& j, TargetPlan& p) {
    p.ring_sites = j.at("ring_sites").get<std::size_t>();
    p.coupling = j.at("coupling").get<double>();
    p.stages.clear();
    for (const auto& s : j.at("stages")) p.stages.push_back({s.at("flux").get<double>(), s.at("duration").get<double>()});
    p.encoded_site = j.at("encoding").at("mu").get<SiteId>();
    p.relay_site = j.at("relay_site").get<SiteId>();
    p.transfer_amplitude = j.at("transfer_amplitude").get<double>();
    p.m = j.at("target").at(0).get<SiteId>();
    p.n = j.at("target").at(1).get<SiteId>();
    p.achieved_C = j.at("achieved_C").get<double>();
}

// Involution / classification ------------------------------------------------

inline void to_json(json& j, const Involution& inv) {
    auto pairs = json::array();
    for (const auto& [a, b] : inv.swap_pairs) pairs.push_back({a, b});
    j = {{"permutation", inv.permutation},
         {"cycles", inv.cycle_notation()},
         {"fixed_sites", inv.fixed_sites},
         {"swap_pairs", std::move(pairs)}};
}

inline void from_json(const json& j, Involution& inv) {
    inv = Involution::from_permutation(j.at("permutation").get<std::vector<SiteId>>());
}

inline void to_json(json& j, const SymmetryClassification& c) {
    j = {{"class", to_string(c.kind)},
         {"mu", c.mu},
         {"nu", c.nu ? json(*c.nu) : json(nullptr)},
         {"target", {c.m, c.n}},
         {"witness", c.witness ? json(*c.witness) : json(nullptr)}};
}

inline void from_json(const json& j, SymmetryClassification& c) {
    const auto k = j.at("class").get<std::string>();
    if (k == "class-I") c.kind = SymmetryClass::ClassI;
    else if (k == "class-II") c.kind = SymmetryClass::ClassII;
    else if (k == "none") c.kind = SymmetryClass::None;
    else throw Error(ErrorKind::Parse, "class: unknown symmetry class \"" + k + "\"");
    c.mu = j.at("mu").get<SiteId>();
    c.nu = j.at("nu").is_null() ? std::nullopt : std::optional<SiteId>(j.at("nu").get<SiteId>());
    c.m = j.at("target").at(0).get<SiteId>();
    c.n = j.at("target").at(1).get<SiteId>();
    c.witness = j.at("witness").is_null() ? std::nullopt : std::optional<Involution>(j.at("witness").get<Involution>());
}

inline void to_json(json& j, const CmaxPrediction& p) {
    j = {{"predicted_C_max", real_json(p.predicted)},
         {"amplitude", real_json(p.amplitude)},
         {"t_star", real_json(p.t_star)},
         {"cross_m", p.cross_m ? real_json(*p.cross_m) : json(nullptr)},
         {"cross_n", p.cross_n ? real_json(*p.cross_n) : json(nullptr)}};
}

inline void from_json(const json& j, CmaxPrediction& p) {
    p.predicted = j.at("predicted_C_max").get<double>();
    p.amplitude = j.at("amplitude").get<double>();
    p.t_star = j.at("t_star").get<double>();
    p.cross_m = j.at("cross_m").is_null() ? std::nullopt : std::optional<double>(j.at("cross_m").get<double>());
    p.cross_n = j.at("cross_n").is_null() ? std::nullopt : std::optional<double>(j.at("cross_n").get<double>());
}

// FourTerms ------------------------------------------------------------------

inline void to_json(json& j, const FourTerms& f) {
    auto terms = json::array();
    auto mags = json::array();
    for (std::size_t k = 0; k < 4; ++k) {
        terms.push_back(complex_json(f.terms[k]));
        mags.push_back(real_json(f.magnitudes[k]));
    }
    j = {{"terms", std::move(terms)}, {"magnitudes", std::move(mags)}, {"concurrence", real_json(f.concurrence)}};
}

inline void from_json(const json& j, FourTerms& f) {
    for (std::size_t k = 0; k < 4; ++k) {
        f.terms[k] = complex_from_json(j.at("terms").at(k));
        f.magnitudes[k] = j.at("magnitudes").at(k).get<double>();
    }
    f.concurrence = j.at("concurrence").get<double>();
}

}  // namespace spinbus
