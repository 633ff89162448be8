#pragma once

// Targeting problems: which encoding, evolution time and ring flux maximize
// the entanglement of a chosen site pair.
//
// At fixed t the pair concurrence is a quadratic form in v = (alpha, beta):
//   C = 2 |v^T Q v|,  Q = [[f_m,mu f_n,mu, s], [s, f_m,nu f_n,nu]],
//   s = (f_m,mu f_n,nu + f_m,nu f_n,mu) / 2,
// so max C = 2 sigma_max(Q) at v = conj(u), u the leading Takagi vector
// (Q conj(u) = sigma u). Takagi vectors of Q are the (x, y) eigenvectors of
// the real symmetric [[Re Q, Im Q], [Im Q, -Re Q]] with u = x + i y.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinbus/dynamics.hpp"
#include "spinbus/entanglement.hpp"
#include "spinbus/error.hpp"
#include "spinbus/graph.hpp"
#include "spinbus/parallel.hpp"
#include "spinbus/search.hpp"
#include "spinbus/symmetry.hpp"

namespace spinbus {

enum class OptimumMethod { ClosedForm, GridSearch };

constexpr const char* to_string(OptimumMethod m) {
    return m == OptimumMethod::ClosedForm ? "closed-form" : "grid-search";
}

struct EncodingOptimum {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};
    double C = 0.0;
    double t = 0.0;
    OptimumMethod method = OptimumMethod::ClosedForm;

    [[nodiscard]] double alpha_abs() const { return std::abs(alpha); }
    /// arg(beta / alpha), 0 when either amplitude vanishes.
    [[nodiscard]] double relative_phase() const {
        if (std::abs(alpha) == 0.0 || std::abs(beta) == 0.0) return 0.0;
        return std::arg(beta * std::conj(alpha));
    }
};

/// Relative tolerance under which the top two Takagi values count as equal.
inline constexpr double kTakagiDegeneracy = 1e-9;

namespace detail {

struct QuadraticForm {
    Complex q11, q12, q22;

    [[nodiscard]] Complex value(Complex a, Complex b) const { return a * a * q11 + 2.0 * a * b * q12 + b * b * q22; }
};

inline QuadraticForm encoding_form(const AmplitudeMatrix& f, SiteId mu, SiteId nu, SiteId m, SiteId n) {
    const Complex mmu = f(m, mu), nmu = f(n, mu), mnu = f(m, nu), nnu = f(n, nu);
    return {mmu * nmu, 0.5 * (mmu * nnu + mnu * nmu), mnu * nnu};
}

inline void check_quad(const AmplitudeMatrix& f, SiteId mu, SiteId nu, SiteId m, SiteId n) {
    if (m == n) throw Error(ErrorKind::InvalidTarget, "target sites must differ");
    if (mu == nu) throw Error(ErrorKind::InvalidInput, "encoded sites must differ");
    const auto d = f.dim();
    if (mu >= d || nu >= d || m >= d || n >= d) throw Error(ErrorKind::InvalidInput, "site outside the graph");
}

/// Global phase fixed so that alpha is real non-negative (beta when alpha = 0).
inline void normalize_phase(Complex& a, Complex& b) {
    const Complex ref = std::abs(a) > 0.0 ? a : b;
    if (std::abs(ref) == 0.0) return;
    const Complex rot = std::conj(ref) / std::abs(ref);
    a *= rot;
    b *= rot;
    if (std::abs(a) > 0.0) a = std::abs(a);
    else b = std::abs(b);
}

inline EncodingOptimum takagi_optimum(const QuadraticForm& q, double t) {
    Eigen::Matrix4d M;
    const double r11 = q.q11.real(), r12 = q.q12.real(), r22 = q.q22.real();
    const double i11 = q.q11.imag(), i12 = q.q12.imag(), i22 = q.q22.imag();
    M << r11, r12, i11, i12,
         r12, r22, i12, i22,
         i11, i12, -r11, -r12,
         i12, i22, -r12, -r22;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(M);
    const double s1 = es.eigenvalues()(3);
    const double s2 = es.eigenvalues()(2);

    EncodingOptimum out;
    out.t = t;
    out.method = OptimumMethod::ClosedForm;
    if (s1 <= std::numeric_limits<double>::min()) return out;  // Q = 0: alpha = 1 convention

    auto takagi = [&](int col) {
        const auto z = es.eigenvectors().col(col);
        return std::array<Complex, 2>{Complex(z(0), z(2)), Complex(z(1), z(3))};
    };
    auto u = takagi(3);
    if (s1 - s2 <= kTakagiDegeneracy * s1) {
        // Every unit real combination cos(th) u1 + sin(th) u2 of the top pair
        // is optimal. Pick the one whose encoding is closest to maximal
        // entanglement, |alpha|^2 closest to 1/2.
        const auto u2 = takagi(2);
        const double c0 = 0.5 * (std::norm(u[0]) + std::norm(u2[0]));
        const double cx = 0.5 * (std::norm(u[0]) - std::norm(u2[0]));
        const double sx = (u[0] * std::conj(u2[0])).real();
        const double amp = std::hypot(cx, sx);
        double two_theta = 0.0;
        if (amp > 0.0) {
            const double phi = std::atan2(sx, cx);
            two_theta = phi + std::acos(std::clamp((0.5 - c0) / amp, -1.0, 1.0));
        }
        const double c = std::cos(0.5 * two_theta), s = std::sin(0.5 * two_theta);
        u = {c * u[0] + s * u2[0], c * u[1] + s * u2[1]};
    }
    Complex a = std::conj(u[0]);
    Complex b = std::conj(u[1]);
    const double norm = std::sqrt(std::norm(a) + std::norm(b));
    a /= norm;
    b /= norm;
    normalize_phase(a, b);
    out.alpha = a;
    out.beta = b;
    out.C = std::min(1.0, 2.0 * std::abs(q.value(a, b)));
    return out;
}

}  // namespace detail

/// Best encoding on (mu, nu) for target (m, n) at the time of `f`.
inline EncodingOptimum optimal_encoding_at_time(const AmplitudeMatrix& f, SiteId mu, SiteId nu, SiteId m, SiteId n) {
    detail::check_quad(f, mu, nu, m, n);
    return detail::takagi_optimum(detail::encoding_form(f, mu, nu, m, n), f.t);
}

/// Brute-force optimum over |alpha| in [0, 1] (amp_steps points, ends
/// included) and relative phase in [0, 2 pi) (phase_steps points).
inline EncodingOptimum optimal_encoding_grid(const AmplitudeMatrix& f, SiteId mu, SiteId nu, SiteId m, SiteId n,
                                             std::size_t amp_steps = 400, std::size_t phase_steps = 400) {
    detail::check_quad(f, mu, nu, m, n);
    if (amp_steps < 2 || phase_steps < 1) throw Error(ErrorKind::InvalidInput, "grid too coarse");
    const auto q = detail::encoding_form(f, mu, nu, m, n);
    EncodingOptimum best;
    best.t = f.t;
    best.method = OptimumMethod::GridSearch;
    best.C = -1.0;
    for (std::size_t i = 0; i < amp_steps; ++i) {
        const double a = static_cast<double>(i) / static_cast<double>(amp_steps - 1);
        const double b_abs = std::sqrt(std::max(0.0, 1.0 - a * a));
        for (std::size_t k = 0; k < phase_steps; ++k) {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(phase_steps);
            const Complex b = std::polar(b_abs, phase);
            const double c = 2.0 * std::abs(q.value(a, b));
            if (c > best.C) {
                best.C = c;
                best.alpha = a;
                best.beta = b;
            }
        }
    }
    return best;
}

/// Closed-form optimum on the uniform grid of `steps` times over [0, horizon];
/// ties go to the earliest time.
inline EncodingOptimum optimize_over_time(const Propagator& p, SiteId mu, SiteId nu, SiteId m, SiteId n,
                                          double horizon, std::size_t steps) {
    if (!(horizon > 0.0) || steps < 2) throw Error(ErrorKind::InvalidInput, "need horizon > 0 and steps >= 2");
    const auto times = uniform_grid(0.0, horizon, steps);
    std::vector<EncodingOptimum> results(steps);
    parallel_for(steps, [&](std::size_t k) {
        results[k] = optimal_encoding_at_time(p.amplitudes(times[k]), mu, nu, m, n);
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < steps; ++k) {
        if (results[k].C > results[best].C + kTieTolerance) best = k;
    }
    return results[best];
}

/// max over t in [0, horizon] of C_mn for a fixed encoding.
inline ScalarMax best_concurrence_over_time(const Propagator& p, const Encoding& e, SiteId m, SiteId n,
                                            double horizon, std::size_t steps) {
    if (m == n) throw Error(ErrorKind::InvalidTarget, "target sites must differ");
    return maximize_scalar([&](double t) { return concurrence_at(p, e, m, n, t); }, 0.0, horizon, steps);
}

// ---------------------------------------------------------------------------
// Flux-controlled transfer on rings

struct FluxSearchBudget {
    std::size_t flux_points = 512;  // over [0, 1) flux quanta
    std::size_t time_points = 4096;
    std::size_t refine_points = 64;  // per axis in the local refinement pass
};

struct FluxTransferResult {
    double flux = 0.0;  // flux quanta in [0, 1)
    double t = 0.0;
    double amplitude = 0.0;  // |f_target,source|
    double probability = 0.0;
};

namespace detail {

struct FluxPoint {
    double flux = 0.0;
    double t = 0.0;
    double amplitude = -1.0;
};

/// Larger amplitude wins, then earlier time, then smaller flux.
inline bool better(const FluxPoint& a, const FluxPoint& b) {
    if (a.amplitude != b.amplitude) return a.amplitude > b.amplitude;
    if (a.t != b.t) return a.t < b.t;
    return a.flux < b.flux;
}

struct RingChannel {
    Eigen::VectorXd energies;
    Eigen::VectorXcd weights;  // V_target,k conj(V_source,k)

    [[nodiscard]] double amplitude(double t) const {
        Complex acc = 0.0;
        for (Eigen::Index k = 0; k < energies.size(); ++k) acc += weights(k) * std::polar(1.0, -energies(k) * t);
        return std::abs(acc);
    }
};

inline RingChannel ring_channel(std::size_t n, double coupling, double flux, SiteId source, SiteId target) {
    const auto p = diagonalize(make_ring(n, coupling, flux));
    RingChannel ch{p.eigenvalues(), Eigen::VectorXcd(p.eigenvalues().size())};
    for (Eigen::Index k = 0; k < ch.weights.size(); ++k) {
        ch.weights(k) = p.eigenvectors()(static_cast<Eigen::Index>(target), k) *
                        std::conj(p.eigenvectors()(static_cast<Eigen::Index>(source), k));
    }
    return ch;
}

inline double wrap_flux(double x) {
    x -= std::floor(x);
    return x >= 1.0 ? 0.0 : x;
}

}  // namespace detail

/// Maximizes |f_target,source(t; flux)| on a ring over the flux x time grid,
/// then refines around the best cell.
inline FluxTransferResult flux_transfer_search(std::size_t n, double coupling, SiteId source, SiteId target,
                                               const FluxSearchBudget& budget, double time_horizon) {
    if (n < 3) throw Error(ErrorKind::InvalidSize, "ring needs n >= 3");
    if (source >= n || target >= n) throw Error(ErrorKind::InvalidInput, "site outside the ring");
    if (source == target) throw Error(ErrorKind::InvalidTarget, "source and target must differ");
    if (budget.flux_points < 1 || budget.time_points < 2 || !(time_horizon > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "flux search needs flux_points >= 1, time_points >= 2, horizon > 0");
    }
    const auto times = uniform_grid(0.0, time_horizon, budget.time_points);
    std::vector<detail::FluxPoint> per_flux(budget.flux_points);
    parallel_for(budget.flux_points, [&](std::size_t a) {
        const double flux = static_cast<double>(a) / static_cast<double>(budget.flux_points);
        const auto ch = detail::ring_channel(n, coupling, flux, source, target);
        detail::FluxPoint best{flux, 0.0, -1.0};
        for (double t : times) {
            const double amp = ch.amplitude(t);
            if (amp > best.amplitude) best = {flux, t, amp};
        }
        per_flux[a] = best;
    });
    detail::FluxPoint best = per_flux.front();
    for (const auto& pt : per_flux) {
        if (detail::better(pt, best)) best = pt;
    }

    if (budget.refine_points >= 2) {
        const double dflux = 1.0 / static_cast<double>(budget.flux_points);
        const double dt = time_horizon / static_cast<double>(budget.time_points - 1);
        const auto fluxes = uniform_grid(best.flux - dflux, best.flux + dflux, budget.refine_points);
        const auto local_t = uniform_grid(std::max(0.0, best.t - dt), std::min(time_horizon, best.t + dt),
                                          budget.refine_points);
        std::vector<detail::FluxPoint> local(fluxes.size());
        parallel_for(fluxes.size(), [&](std::size_t a) {
            const auto ch = detail::ring_channel(n, coupling, fluxes[a], source, target);
            detail::FluxPoint pt{fluxes[a], 0.0, -1.0};
            for (double t : local_t) {
                const double amp = ch.amplitude(t);
                if (amp > pt.amplitude) pt = {fluxes[a], t, amp};
            }
            const double lo = std::max(0.0, pt.t - (local_t[1] - local_t[0]));
            const double hi = std::min(time_horizon, pt.t + (local_t[1] - local_t[0]));
            const auto polished = maximize_scalar([&](double t) { return ch.amplitude(t); }, lo, hi, 3);
            if (polished.value > pt.amplitude) pt = {fluxes[a], polished.x, polished.value};
            local[a] = pt;
        });
        for (const auto& pt : local) {
            if (pt.amplitude > best.amplitude) best = pt;
        }
    }
    const double amp = std::min(1.0, best.amplitude);
    return {detail::wrap_flux(best.flux), best.t, amp, amp * amp};
}

// ---------------------------------------------------------------------------
// Two-stage fixed-site targeting on rings

struct PlanStage {
    double flux = 0.0;
    double duration = 0.0;
};

struct PlanBudget {
    FluxSearchBudget transfer;
    std::optional<double> transfer_horizon;  // default 40/|J|
    std::size_t evolution_points = 4096;
    std::optional<double> evolution_horizon;  // default 40/|J|
    bool keep_flux = false;  // stage 2 keeps the stage-1 flux instead of free evolution
};

struct TargetPlan {
    std::size_t ring_sites = 0;
    double coupling = 1.0;
    std::vector<PlanStage> stages;
    SiteId encoded_site = 0;
    SiteId relay_site = 0;  // site on the mirror line through which m <-> n swap
    double transfer_amplitude = 1.0;
    SiteId m = 0;
    SiteId n = 0;
    double achieved_C = 0.0;

    [[nodiscard]] Encoding encoding() const { return Encoding::single(encoded_site); }
};

/// Concurrence of the target pair recomputed from scratch as the product of
/// the stage evolution operators applied to the encoded site.
inline double evaluate_plan(const TargetPlan& plan) {
    const auto N = static_cast<Eigen::Index>(plan.ring_sites);
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Identity(N, N);
    double t = 0.0;
    for (const auto& st : plan.stages) {
        const auto p = diagonalize(make_ring(plan.ring_sites, plan.coupling, st.flux));
        total = transition_amplitudes(p, st.duration).f * total;
        t += st.duration;
    }
    const AmplitudeMatrix composed{t, std::move(total)};
    return concurrence_closed_form(pair_amplitudes(composed, plan.encoding(), plan.m, plan.n));
}

namespace detail {

inline TargetPlan plan_via(std::size_t ring, double coupling, SiteId mu, SiteId relay, SiteId m, SiteId n,
                           const PlanBudget& budget) {
    TargetPlan plan;
    plan.ring_sites = ring;
    plan.coupling = coupling;
    plan.encoded_site = mu;
    plan.relay_site = relay;
    plan.m = m;
    plan.n = n;

    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ring));
    psi(static_cast<Eigen::Index>(mu)) = 1.0;
    double stage1_flux = 0.0;
    if (relay == mu) {
        plan.stages.push_back({0.0, 0.0});
    } else {
        const double horizon = budget.transfer_horizon.value_or(40.0 / std::abs(coupling));
        const auto tr = flux_transfer_search(ring, coupling, mu, relay, budget.transfer, horizon);
        plan.stages.push_back({tr.flux, tr.t});
        plan.transfer_amplitude = tr.amplitude;
        stage1_flux = tr.flux;
        psi = diagonalize(make_ring(ring, coupling, tr.flux)).evolve(psi, tr.t);
    }

    const double stage2_flux = budget.keep_flux ? stage1_flux : 0.0;
    const auto p2 = diagonalize(make_ring(ring, coupling, stage2_flux));
    const Eigen::VectorXcd coeff = p2.eigenvectors().adjoint() * psi;
    const auto& vec = p2.eigenvectors();
    const auto& val = p2.eigenvalues();
    auto concurrence = [&](double t) {
        Complex a = 0.0, b = 0.0;
        for (Eigen::Index k = 0; k < val.size(); ++k) {
            const Complex ck = coeff(k) * std::polar(1.0, -val(k) * t);
            a += vec(static_cast<Eigen::Index>(m), k) * ck;
            b += vec(static_cast<Eigen::Index>(n), k) * ck;
        }
        return 2.0 * std::abs(a) * std::abs(b);
    };
    const double horizon = budget.evolution_horizon.value_or(40.0 / std::abs(coupling));
    const auto best = maximize_scalar(concurrence, 0.0, horizon, budget.evolution_points);
    plan.stages.push_back({stage2_flux, best.x});
    plan.achieved_C = best.value;
    return plan;
}

}  // namespace detail

/// Entangles (m, n) on a ring by exciting the fixed site mu only: stage 1
/// moves the excitation with a threaded flux to the site on the mirror line
/// that swaps m <-> n, stage 2 evolves freely to the best time.
inline TargetPlan plan_targeting(std::size_t ring, double coupling, SiteId mu, SiteId m, SiteId n,
                                 const PlanBudget& budget = {}) {
    if (ring < 3) throw Error(ErrorKind::InvalidSize, "ring needs n >= 3");
    if (mu >= ring || m >= ring || n >= ring) throw Error(ErrorKind::InvalidInput, "site outside the ring");
    if (m == n) throw Error(ErrorKind::InvalidTarget, "target sites must differ");
    if (coupling == 0.0) throw Error(ErrorKind::InvalidInput, "coupling must be nonzero");

    const auto involutions = find_involutions(make_ring(ring, coupling, 0.0));
    std::vector<SiteId> relays;
    bool site_free_line = false;
    for (const auto& inv : involutions) {
        if (!inv.swaps(m, n)) continue;
        if (inv.fixed_sites.empty()) site_free_line = true;
        relays.insert(relays.end(), inv.fixed_sites.begin(), inv.fixed_sites.end());
    }
    if (relays.empty()) {
        if (site_free_line) {
            throw Error(ErrorKind::RequiresMeEncoding,
                        "the mirror line swapping " + std::to_string(m) + " and " + std::to_string(n) +
                            " passes through no site; this pair needs a maximally entangled encoding");
        }
        throw Error(ErrorKind::Precondition, "no mirror line swaps the target pair");
    }
    std::sort(relays.begin(), relays.end());
    relays.erase(std::unique(relays.begin(), relays.end()), relays.end());

    std::optional<TargetPlan> best;
    for (SiteId relay : relays) {
        auto plan = detail::plan_via(ring, coupling, mu, relay, m, n, budget);
        if (!best || plan.achieved_C > best->achieved_C) best = std::move(plan);
    }
    return *best;
}

// ---------------------------------------------------------------------------
// Disconnected graphs

/// max over times of |C_mn(t) - 2|alpha beta| |f_m,mu(t)| |f_n,nu(t)||, valid when
/// (mu, m) and (nu, n) sit in two different connected components.
inline double isolated_factorization_check(const SpinGraph& g, const Encoding& e, SiteId m, SiteId n,
                                           std::span<const double> times) {
    const std::size_t N = g.n_sites();
    if (e.mu() >= N || e.nu() >= N || m >= N || n >= N) throw Error(ErrorKind::InvalidInput, "site outside the graph");
    if (m == n) throw Error(ErrorKind::InvalidTarget, "target sites must differ");
    const auto label = component_labels(g);
    if (label[e.mu()] != label[m] || label[e.nu()] != label[n] || label[e.mu()] == label[e.nu()]) {
        throw Error(ErrorKind::Precondition,
                    "mu and m must share one connected component and nu and n a different one");
    }
    const auto p = diagonalize(g);
    const double c0 = 2.0 * std::abs(e.alpha() * e.beta());
    std::vector<double> dev(times.size(), 0.0);
    parallel_for(times.size(), [&](std::size_t k) {
        const auto f = p.amplitudes(times[k]);
        const double c = concurrence_closed_form(pair_amplitudes(f, e, m, n));
        dev[k] = std::abs(c - c0 * std::abs(f(m, e.mu())) * std::abs(f(n, e.nu())));
    });
    double worst = 0.0;
    for (double d : dev) worst = std::max(worst, d);
    return worst;
}

}  // namespace spinbus
