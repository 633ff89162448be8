// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "spinbus/spinbus.hpp"

using namespace spinbus;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Detail {
public:
    Detail() { os_ << std::setprecision(6); }
    template <class T>
    Detail& operator<<(const T& v) {
        os_ << v;
        return *this;
    }
    [[nodiscard]] std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SpinGraph random_graph(std::mt19937_64& rng, std::size_t n, Model model, bool fields, bool flux) {
    std::uniform_real_distribution<double> coupling(0.3, 1.5);
    std::uniform_real_distribution<double> field(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(-kPi, kPi);
    std::bernoulli_distribution extra(0.4);
    std::vector<Bond> bonds;
    for (SiteId i = 0; i < n; ++i) {
        for (SiteId j = i + 1; j < n; ++j) {
            if (j == i + 1 || extra(rng)) bonds.push_back({i, j, coupling(rng), flux ? phase(rng) : 0.0});
        }
    }
    std::vector<double> b(n, 0.0);
    if (fields) {
        for (auto& x : b) x = field(rng);
    }
    return SpinGraph(model, std::move(b), std::move(bonds));
}

// 1 -------------------------------------------------------------------------
Outcome oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);
    std::vector<SpinGraph> graphs;
    graphs.push_back(make_chain(2, 1.0));
    graphs.push_back(make_chain(5, 0.8, {0.1, -0.2, 0.3, 0.0, 0.5}, Model::XY));
    graphs.push_back(make_chain(6, 1.0, std::vector<double>(6, 0.0), Model::Heisenberg));
    graphs.push_back(make_chain(std::vector<double>{1.0, 0.7, 1.3, 0.9, 1.1, 0.6, 1.2},
                                std::vector<double>{0.2, 0.0, -0.4, 0.1, 0.0, 0.3, -0.1, 0.05}, Model::Heisenberg));
    graphs.push_back(make_ring(3, 1.0, 0.0));
    graphs.push_back(make_ring(4, 1.0, 0.25));
    graphs.push_back(make_ring(5, 1.0, 0.37, Model::Heisenberg));
    graphs.push_back(make_ring(7, 0.6, 0.5));
    graphs.push_back(make_ring(8, 1.0, 0.13, Model::Heisenberg));
    graphs.push_back(disjoint_union(make_chain(2, 1.0), make_chain(3, 1.0)));
    graphs.push_back(disjoint_union(make_ring(3, 1.0, 0.2), make_chain(4, 0.5, std::vector<double>(4, 0.3))));
    graphs.push_back(disjoint_union(make_chain(1, 1.0, {0.4}), make_ring(5, 1.0, 0.1)));
    for (int k = 0; k < 8; ++k) {
        graphs.push_back(random_graph(rng, 3 + k % 6, k % 2 ? Model::XY : Model::Heisenberg, k % 3 != 0, k % 2 == 0));
    }
    double worst_dev = 0.0, worst_comm = 0.0;
    for (const auto& g : graphs) {
        const auto full = build_full_space(g);
        worst_comm = std::max(worst_comm, check_excitation_conservation(full));
        const auto block = extract_single_excitation_block(full);
        worst_dev = std::max(worst_dev, aligned_max_deviation(block.matrix, build_single_excitation(g).matrix));
    }
    const double elapsed = seconds_since(start);
    return {graphs.size() == 20 && worst_dev <= 1e-9 && worst_comm <= 1e-10 && elapsed < 10.0,
            (Detail() << graphs.size() << " graphs, max |block - H| " << worst_dev << ", max commutator " << worst_comm
                      << ", " << elapsed << " s")
                .str()};
}

// 2 -------------------------------------------------------------------------
Outcome unitarity() {
    std::mt19937_64 rng(2002);
    std::uniform_real_distribution<double> time(0.0, 50.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto g = random_graph(rng, 2 + k % 11, k % 2 ? Model::XY : Model::Heisenberg, k % 3 != 0, k % 4 != 0);
        const auto f = transition_amplitudes(diagonalize(g), time(rng));
        for (Eigen::Index j = 0; j < f.f.cols(); ++j) worst = std::max(worst, std::abs(f.f.col(j).norm() - 1.0));
    }
    return {worst <= 1e-10, (Detail() << "100 samples, max column-norm deviation " << worst).str()};
}

// 3 -------------------------------------------------------------------------
Outcome analytic_dynamics() {
    double worst = 0.0;
    for (double J : {1.0, 0.7}) {
        const auto p = diagonalize(make_chain(2, J));
        for (int k = 0; k < 1000; ++k) {
            const double t = 0.01 * k;
            worst = std::max(worst, std::abs(p.amplitude(1, 0, t) - Complex(0.0, -std::sin(2.0 * J * t))));
        }
    }
    const auto ring = diagonalize(make_ring(3, 1.0, 0.0));
    const double ring_max = max_amplitude_over_time(ring, 1, 0, 10.0, 10001).value;
    return {worst <= 1e-10 && std::abs(ring_max - 2.0 / 3.0) <= 1e-6,
            (Detail() << "2-site max |f_10 + i sin 2Jt| " << worst << "; 3-ring max|f_10| " << std::setprecision(12)
                      << ring_max)
                .str()};
}

// 4 -------------------------------------------------------------------------
Outcome concurrence_oracle() {
    std::mt19937_64 rng(4004);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double total = u(rng), split = u(rng);
        const PairAmplitudes pa{std::polar(std::sqrt(total * split), ph(rng)),
                                std::polar(std::sqrt(total * (1.0 - split)), ph(rng)), 0, 1, 0.0};
        worst = std::max(worst, std::abs(concurrence_closed_form(pa) - concurrence_wootters(pair_state(pa))));
    }
    return {worst <= 1e-10, (Detail() << "1000 states, max |2|AB| - C_Wootters| " << worst).str()};
}

// 5 -------------------------------------------------------------------------
Outcome class_one_symmetry() {
    const auto g = make_chain(5, 1.0);
    const auto p = diagonalize(g);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        const double t = 0.04 * k;
        worst = std::max(worst, std::abs(std::abs(p.amplitude(1, 2, t)) - std::abs(p.amplitude(3, 2, t))));
    }
    const auto cover = counterpart_coverage(g, 2);
    const bool cover_ok = cover == SitePairSet{{0, 4}, {1, 3}};
    Detail d;
    d << "max ||f_12| - |f_32|| " << worst << "; coverage(2) = {";
    for (const auto& [a, b] : cover) d << "(" << a << "," << b << ")";
    d << "}";
    return {worst <= 1e-10 && cover_ok, d.str()};
}

// 6 -------------------------------------------------------------------------
Outcome class_one_disentangled() {
    struct Case {
        const char* name;
        SpinGraph g;
        SiteId mu, nu, m, n;
    };
    const std::vector<Case> cases{{"5-chain", make_chain(5, 1.0), 2, 1, 1, 3},
                                  {"5-ring", make_ring(5, 1.0, 0.0), 0, 1, 1, 4}};
    bool ok = true;
    Detail d;
    for (const auto& c : cases) {
        const auto cls = classify(c.g, c.mu, c.nu, c.m, c.n);
        const auto p = diagonalize(c.g);
        const auto best = optimize_over_time(p, c.mu, c.nu, c.m, c.n, 20.0, 2001);
        const auto peak = max_amplitude_over_time(p, c.m, c.mu, 20.0, 2001);
        const auto pred = predicted_cmax(cls, p, peak.x);
        const double rel = std::abs(best.C - pred.predicted) / pred.predicted;
        const bool pass = cls.kind == SymmetryClass::ClassI && best.alpha_abs() >= 0.95 && rel <= 0.05;
        ok = ok && pass;
        d << c.name << " mu=" << c.mu << " nu=" << c.nu << " (" << c.m << "," << c.n << "): |alpha| "
          << best.alpha_abs() << ", C* " << best.C << " at t " << best.t << ", predicted " << pred.predicted
          << " at t*_m,mu " << peak.x << " (rel " << rel << "), cross |f_mnu| " << *pred.cross_m << " |f_nnu| " << *pred.cross_n << "; ";
    }
    return {ok, d.str()};
}

// 7 -------------------------------------------------------------------------
Outcome class_two_me() {
    const auto g = make_chain(4, 1.0);
    const auto p = diagonalize(g);
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
        const auto f = p.amplitudes(0.02 * k);
        worst = std::max(worst, std::abs(f(1, 3) - f(2, 0)));
    }
    const auto cls = classify(g, 0, 3, 1, 2);
    const auto best = optimize_over_time(p, 0, 3, 1, 2, 20.0, 2001);
    const auto peak = max_amplitude_over_time(p, 1, 0, 20.0, 2001);
    const auto pred = predicted_cmax(cls, p, peak.x);
    const double ab = std::abs(best.alpha * best.beta);
    const double rel = std::abs(best.C - pred.predicted) / pred.predicted;
    return {cls.kind == SymmetryClass::ClassII && worst <= 1e-10 && std::abs(ab - 0.5) <= 1e-2 && rel <= 0.05,
            (Detail() << "max |f_13 - f_20| " << worst << ", |alpha beta| " << ab << ", C* " << best.C << " at t "
                      << best.t << ", predicted " << pred.predicted << " at t*_10 " << peak.x << " (rel " << rel << ")")
                .str()};
}

// 8 -------------------------------------------------------------------------
Outcome rotational_bound() {
    const double bound = 1.0 / std::sqrt(2.0) + 1e-6;
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::size_t n = 3; n <= 8; ++n) {
        const auto p = diagonalize(make_ring(n, 1.0, 0.0));
        for (SiteId target = 1; target < n; ++target) {
            if (2 * target == n) continue;  // opposite site has no partner at equal distance
            worst = std::max(worst, max_amplitude_over_time(p, target, 0, 100.0, 40001).value);
            ++checked;
        }
    }
    return {worst <= bound,
            (Detail() << checked << " (ring, target) cases, max_t |f| " << std::setprecision(10) << worst
                      << " vs bound " << bound)
                .str()};
}

// 9 -------------------------------------------------------------------------
Outcome flux_transfer() {
    bool ok = true;
    Detail d;
    for (std::size_t n : {5u, 7u}) {
        const auto start = std::chrono::steady_clock::now();
        double worst = 2.0;
        FluxTransferResult worst_r;
        SiteId ws = 0, wt = 0;
        for (SiteId s = 0; s < n; ++s) {
            for (SiteId t = 0; t < n; ++t) {
                if (s == t) continue;
                const auto r = flux_transfer_search(n, 1.0, s, t, FluxSearchBudget{}, 40.0);
                if (r.amplitude < worst) {
                    worst = r.amplitude;
                    worst_r = r;
                    ws = s;
                    wt = t;
                }
            }
        }
        const double elapsed = seconds_since(start);
        ok = ok && worst >= 0.95 && elapsed < 60.0;
        d << n << "-ring: min best amplitude " << worst << " (" << ws << "->" << wt << ", flux " << worst_r.flux
          << ", t " << worst_r.t << "), " << elapsed << " s; ";
    }
    return {ok, d.str()};
}

// 10 ------------------------------------------------------------------------
Outcome fixed_site_targeting() {
    bool ok = true;
    double worst = 2.0, worst_recompute = 0.0;
    std::size_t plans = 0;
    for (SiteId m = 0; m < 5; ++m) {
        for (SiteId n = m + 1; n < 5; ++n) {
            const auto plan = plan_targeting(5, 1.0, 0, m, n);
            ok = ok && plan.encoding().alpha() == Complex(1.0) && plan.encoding().beta() == Complex(0.0);
            worst = std::min(worst, plan.achieved_C);
            worst_recompute = std::max(worst_recompute, std::abs(evaluate_plan(plan) - plan.achieved_C));
            ++plans;
        }
    }
    bool even_error = false;
    try {
        plan_targeting(4, 1.0, 0, 1, 2);
    } catch (const Error& e) {
        even_error = e.kind() == ErrorKind::RequiresMeEncoding;
    }
    ok = ok && plans == 10 && worst >= 0.8 && worst_recompute <= 1e-10 && even_error;
    return {ok, (Detail() << plans << " pairs, min achieved_C " << worst << ", recompute deviation "
                          << worst_recompute << "; 4-ring (1,2) " << (even_error ? "requires-me-encoding" : "no error"))
                    .str()};
}

// 11 ------------------------------------------------------------------------
Outcome isolated_factorization() {
    const auto g = disjoint_union(make_chain(2, 1.0), make_chain(3, 1.0));
    const auto e = Encoding::from_polar(0, 2, std::sqrt(0.5), 0.4);
    std::vector<double> times;
    for (int k = 0; k < 200; ++k) times.push_back(0.05 * k);
    const double dev = isolated_factorization_check(g, e, 1, 4, times);
    return {dev <= 1e-10, (Detail() << "200 times, max deviation " << dev).str()};
}

// 12 ------------------------------------------------------------------------
Outcome encoding_dependence() {
    const auto g = make_chain(std::vector<double>{1.0, 0.7, 1.3, 0.9, 1.1}, std::vector<double>(6, 0.0), Model::XY);
    const auto p = diagonalize(g);
    const auto a = optimize_over_time(p, 0, 2, 1, 4, 20.0, 2001);
    const auto b = optimize_over_time(p, 0, 2, 2, 3, 20.0, 2001);
    const double dphase = std::remainder(a.relative_phase() - b.relative_phase(), 2.0 * kPi);
    const double distance = std::hypot(a.alpha_abs() - b.alpha_abs(), dphase);

    const auto e1 = Encoding::from_polar(0, 2, std::cos(0.3), 0.0);
    const auto e2 = Encoding::from_polar(0, 2, std::sin(0.3), 0.0);
    const double c1 = best_concurrence_over_time(p, e1, 1, 4, 20.0, 2001).value;
    const double c2 = best_concurrence_over_time(p, e2, 1, 4, 20.0, 2001).value;
    const double c0_gap = std::abs(e1.initial_concurrence() - e2.initial_concurrence());
    return {distance > 0.1 && c0_gap <= 1e-12 && std::abs(c1 - c2) > 0.05,
            (Detail() << "optimal (|alpha|, phase) for (1,4): (" << a.alpha_abs() << ", " << a.relative_phase()
                      << "), for (2,3): (" << b.alpha_abs() << ", " << b.relative_phase() << "), distance "
                      << distance << "; equal 2|alpha beta| = " << e1.initial_concurrence() << " gives C* " << c1
                      << " vs " << c2)
                .str()};
}

// 13 ------------------------------------------------------------------------
Outcome gauge_invariance() {
    std::mt19937_64 rng(1313);
    std::uniform_real_distribution<double> chi(-2.0 * kPi, 2.0 * kPi);
    std::uniform_real_distribution<double> flux(0.0, 1.0);
    std::uniform_real_distribution<double> time(0.0, 30.0);
    double worst = 0.0;
    int cases = 0;
    for (std::size_t n = 3; n <= 10; ++n) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto g = make_ring(n, 1.0, flux(rng), trial % 2 ? Model::XY : Model::Heisenberg);
            GaugePhases gauge{std::vector<double>(n)};
            for (auto& c : gauge.chi) c = chi(rng);
            const auto p = diagonalize(g);
            const auto q = diagonalize(gauge_transform(g, gauge));
            for (int k = 0; k < 5; ++k) {
                const double t = time(rng);
                const Eigen::MatrixXd diff = p.amplitudes(t).f.cwiseAbs() - q.amplitudes(t).f.cwiseAbs();
                worst = std::max(worst, diff.cwiseAbs().maxCoeff());
            }
            ++cases;
        }
    }
    return {worst <= 1e-10, (Detail() << cases << " gauge transforms, max ||f| - |f'|| " << worst).str()};
}

// 14 ------------------------------------------------------------------------
struct Captured {
    int code = -1;
    std::string out;
};

Captured run_cli(const std::string& env, const std::string& args) {
    const std::string cmd = env + " " + SPINBUS_CLI_PATH + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return {};
    Captured c;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) c.out.append(buf, n);
    const int status = ::pclose(pipe);
    c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return c;
}

Outcome determinism() {
    const std::string s = SPINBUS_SAMPLES_DIR;
    const std::vector<std::string> runs{
        "amplitudes --graph " + s + "/ring7_flux.json --pairs 0:3,2:5 --t-max 20 --steps 2000",
        "simulate --graph " + s + "/chain6_asym.json --mu 0 --nu 2 --alpha 0.8 --phase 0.5 --pair 1:4 --steps 2000",
        "optimize --graph " + s + "/chain6_asym.json --mu 0 --nu 2 --pair 1:4 --horizon 20 --steps 2001",
        "optimize --graph " + s + "/chain4.json --mu 0 --nu 3 --pair 1:2 --horizon 10 --steps 51 --method grid",
        "scan-flux --n 7 --source 0 --target 3 --flux-points 256 --time-points 2048",
        "plan --n 5 --mu 0 --pair 2:4 --flux-points 256 --time-points 2048",
        "symmetry --graph " + s + "/chain5.json --mu 2 --nu 1 --pair 1:3",
        "plan --n 4 --mu 0 --pair 1:2",
    };
    const std::vector<std::string> envs{"SPINBUS_THREADS=1", "SPINBUS_THREADS=1", "SPINBUS_THREADS=4", "SPINBUS_THREADS=7",
                                        ""};
    bool ok = true;
    std::size_t executed = 0;
    std::string mismatch;
    for (const auto& args : runs) {
        const auto ref = run_cli(envs.front(), args);
        ++executed;
        if (ref.code != 0 && ref.code != 2) {
            ok = false;
            mismatch = args;
        }
        for (std::size_t k = 1; k < envs.size(); ++k) {
            const auto other = run_cli(envs[k], args);
            ++executed;
            if (other.code != ref.code || other.out != ref.out) {
                ok = false;
                mismatch = args + " [" + envs[k] + "]";
            }
        }
    }
    Detail d;
    d << runs.size() << " commands x " << envs.size() << " runs (" << executed << " invocations)";
    if (!ok) d << ", mismatch: " << mismatch;
    else d << ", all byte-identical";
    return {ok, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"oracle equivalence", oracle_equivalence},
        {"unitarity", unitarity},
        {"analytic dynamics", analytic_dynamics},
        {"concurrence oracle", concurrence_oracle},
        {"class-I amplitude symmetry", class_one_symmetry},
        {"class-I optimum is disentangled", class_one_disentangled},
        {"class-II optimum is maximally entangled", class_two_me},
        {"rotational-symmetry bound", rotational_bound},
        {"flux-enabled transfer", flux_transfer},
        {"fixed-site targeting", fixed_site_targeting},
        {"isolated factorization", isolated_factorization},
        {"encoding dependence", encoding_dependence},
        {"gauge invariance", gauge_invariance},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << std::setw(2) << k + 1 << "] " << criteria[k].first << ": "
                  << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " acceptance criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
