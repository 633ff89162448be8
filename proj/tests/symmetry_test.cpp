#include "spinbus/symmetry.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "spinbus/report.hpp"

using namespace spinbus;

namespace {

std::vector<std::vector<SiteId>> permutations(const std::vector<Involution>& inv) {
    std::vector<std::vector<SiteId>> out;
    for (const auto& i : inv) out.push_back(i.permutation);
    return out;
}

/// Random graph built to be invariant under `perm`.
SpinGraph symmetric_graph(std::mt19937_64& rng, const std::vector<SiteId>& perm, Model model) {
    const std::size_t n = perm.size();
    std::uniform_real_distribution<double> coupling(0.3, 1.5);
    std::uniform_real_distribution<double> field(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(-3.0, 3.0);
    std::bernoulli_distribution keep(0.5);
    std::vector<double> fields(n);
    for (SiteId i = 0; i < n; ++i) {
        if (perm[i] >= i) fields[i] = fields[perm[i]] = field(rng);
    }
    std::map<std::pair<SiteId, SiteId>, Bond> bonds;
    for (SiteId i = 0; i < n; ++i) {
        for (SiteId j = i + 1; j < n; ++j) {
            if (bonds.count({i, j}) || !(j == i + 1 || keep(rng))) continue;
            const SiteId a = perm[i], b = perm[j];
            // A bond mapped onto itself reversed must carry a real hopping.
            const double ph = (a == j && b == i) ? 0.0 : phase(rng);
            const double J = coupling(rng);
            bonds[{i, j}] = {i, j, J, ph};
            if (a < b) bonds[{a, b}] = {a, b, J, ph};
            else bonds[{b, a}] = {b, a, J, -ph};
        }
    }
    std::vector<Bond> list;
    for (auto& [k, b] : bonds) list.push_back(b);
    return SpinGraph(model, std::move(fields), std::move(list));
}

TEST(FindInvolutions, five_chain) {
    const auto inv = find_involutions(make_chain(5, 1.0));
    ASSERT_EQ(inv.size(), 2u);
    EXPECT_TRUE(inv[0].is_identity());
    EXPECT_EQ(inv[0].cycle_notation(), "()");
    EXPECT_EQ(inv[1].cycle_notation(), "(0 4)(1 3)");
    EXPECT_EQ(inv[1].fixed_sites, (std::vector<SiteId>{2}));
    EXPECT_EQ(inv[1].swap_pairs, (SitePairSet{{0, 4}, {1, 3}}));
}

TEST(FindInvolutions, broken_mirror_leaves_identity) {
    const std::vector<double> J{1.0, 1.0, 1.0, 1.2};
    const auto inv = find_involutions(make_chain(J, std::vector<double>(5, 0.0), Model::XY));
    ASSERT_EQ(inv.size(), 1u);
    EXPECT_TRUE(inv[0].is_identity());
}

TEST(FindInvolutions, zero_flux_rings_have_all_reflections) {
    for (std::size_t n = 3; n <= 9; ++n) {
        const auto inv = find_involutions(make_ring(n, 1.0, 0.0));
        std::size_t reflections = 0;
        for (const auto& i : inv) {
            if (i.is_identity()) continue;
            bool half_turn = n % 2 == 0;
            for (SiteId s = 0; s < n; ++s) half_turn = half_turn && i.permutation[s] == (s + n / 2) % n;
            if (half_turn) continue;
            ++reflections;
            if (n % 2 == 1) {
                EXPECT_EQ(i.fixed_sites.size(), 1u) << i.cycle_notation();
            }
        }
        EXPECT_EQ(reflections, n) << n;
        EXPECT_EQ(inv.size(), n + 1 + (n % 2 == 0 ? 1 : 0)) << n;
    }
}

TEST(FindInvolutions, flux_removes_reflections) {
    const auto odd = find_involutions(make_ring(5, 1.0, 0.3));
    ASSERT_EQ(odd.size(), 1u);
    const auto even = find_involutions(make_ring(6, 1.0, 0.3));
    ASSERT_EQ(even.size(), 2u);
    EXPECT_EQ(even[1].cycle_notation(), "(0 3)(1 4)(2 5)");
}

TEST(FindInvolutions, matches_brute_force) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + trial % 7;
        std::vector<SiteId> perm(n);
        std::iota(perm.begin(), perm.end(), SiteId{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        // Turn the shuffle into an involution by pairing consecutive entries.
        std::vector<SiteId> inv_perm(n);
        std::iota(inv_perm.begin(), inv_perm.end(), SiteId{0});
        for (std::size_t k = 0; k + 1 < n; k += 3) {
            inv_perm[perm[k]] = perm[k + 1];
            inv_perm[perm[k + 1]] = perm[k];
        }
        const auto g = symmetric_graph(rng, inv_perm, trial % 2 ? Model::XY : Model::Heisenberg);
        const auto found = permutations(find_involutions(g));
        EXPECT_EQ(found, oracle::brute_force_involutions(g));
        EXPECT_NE(std::find(found.begin(), found.end(), inv_perm), found.end());
    }
}

TEST(FindInvolutions, matches_brute_force_on_random_and_structured) {
    std::mt19937_64 rng(5);
    std::vector<SpinGraph> graphs;
    for (int k = 0; k < 20; ++k) graphs.push_back(oracle::random_graph(rng, 2 + k % 7, Model::XY, k % 2, k % 3 == 0));
    graphs.push_back(disjoint_union(make_chain(2, 1.0), make_chain(3, 1.0)));
    graphs.push_back(disjoint_union(make_chain(3, 1.0), make_chain(3, 1.0)));
    graphs.push_back(make_ring(4, 1.0, 0.5));
    graphs.push_back(make_ring(8, 0.7, 0.0, Model::Heisenberg));
    for (const auto& g : graphs) EXPECT_EQ(permutations(find_involutions(g)), oracle::brute_force_involutions(g));
}

TEST(FindInvolutions, every_result_reproduces_the_hamiltonian) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = trial % 2 ? make_ring(3 + trial % 6, 1.0, 0.0) : make_chain(2 + trial % 7, 0.9);
        const Eigen::MatrixXcd h = build_single_excitation(g).matrix;
        for (const auto& inv : find_involutions(g)) {
            Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(h.rows(), h.cols());
            for (SiteId i = 0; i < inv.permutation.size(); ++i) p(inv.permutation[i], i) = 1.0;
            EXPECT_LE((p * h * p.transpose() - h).cwiseAbs().maxCoeff(), 1e-12);
            for (SiteId i = 0; i < inv.permutation.size(); ++i) EXPECT_EQ(inv.permutation[inv.permutation[i]], i);
        }
    }
}

TEST(FindInvolutions, large_uniform_ring_fast_path) {
    const auto inv = find_involutions(make_ring(20, 1.0, 0.0));
    EXPECT_EQ(inv.size(), 22u);
    EXPECT_EQ(find_involutions(make_ring(19, 1.0, 0.0)).size(), 20u);
    EXPECT_EQ(find_involutions(make_ring(20, 1.0, 0.2)).size(), 2u);
    try {
        find_involutions(make_chain(17, 1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Resource);
    }
}

TEST(Classify, chain_configurations) {
    const auto c5 = make_chain(5, 1.0);
    const auto a = classify(c5, 2, std::nullopt, 1, 3);
    EXPECT_EQ(a.kind, SymmetryClass::ClassI);
    ASSERT_TRUE(a.witness);
    EXPECT_EQ(a.witness->cycle_notation(), "(0 4)(1 3)");
    EXPECT_EQ(classify(make_chain(4, 1.0), 0, 3, 1, 2).kind, SymmetryClass::ClassII);
    const auto none = classify(c5, 0, std::nullopt, 1, 3);
    EXPECT_EQ(none.kind, SymmetryClass::None);
    EXPECT_FALSE(none.witness);
}

TEST(Classify, class_one_takes_precedence) {
    // 4-ring: the reflection through 0 and 2 fixes mu = 0 and swaps 1, 3;
    // the half turn swaps 0 <-> 2 and 1 <-> 3.
    const auto c = classify(make_ring(4, 1.0, 0.0), 0, 2, 1, 3);
    EXPECT_EQ(c.kind, SymmetryClass::ClassI);
}

TEST(Classify, errors) {
    const auto g = make_chain(4, 1.0);
    try {
        classify(g, 0, std::nullopt, 2, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidTarget);
    }
    EXPECT_THROW(classify(g, 7, std::nullopt, 1, 2), Error);
}

TEST(Classify, class_one_amplitudes_are_equal) {
    const auto g = make_chain(7, 1.0);
    const auto p = diagonalize(g);
    const auto c = classify(g, 3, std::nullopt, 0, 6);
    ASSERT_EQ(c.kind, SymmetryClass::ClassI);
    for (int k = 0; k < 200; ++k) {
        const double t = 0.1 * k;
        EXPECT_NEAR(std::abs(p.amplitude(0, 3, t)), std::abs(p.amplitude(6, 3, t)), 1e-12);
    }
}

TEST(PredictedCmax, class_factors) {
    const auto g5 = make_chain(5, 1.0);
    const auto p5 = diagonalize(g5);
    const auto c1 = classify(g5, 2, 1, 1, 3);
    const auto pr1 = predicted_cmax(c1, p5, 0.8);
    const double f1 = std::abs(p5.amplitude(1, 2, 0.8));
    EXPECT_NEAR(pr1.predicted, 2 * f1 * f1, 1e-14);
    ASSERT_TRUE(pr1.cross_m && pr1.cross_n);
    EXPECT_NEAR(*pr1.cross_m, std::abs(p5.amplitude(1, 1, 0.8)), 1e-14);

    const auto g4 = make_chain(4, 1.0);
    const auto p4 = diagonalize(g4);
    const auto pr2 = predicted_cmax(classify(g4, 0, 3, 1, 2), p4, 1.1);
    const double f2 = std::abs(p4.amplitude(1, 0, 1.1));
    EXPECT_NEAR(pr2.predicted, f2 * f2, 1e-14);

    try {
        predicted_cmax(classify(g5, 0, std::nullopt, 1, 3), p5, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidClassification);
    }
}

TEST(Coverage, five_chain) {
    const auto g = make_chain(5, 1.0);
    EXPECT_EQ(counterpart_coverage(g, 2), (SitePairSet{{0, 4}, {1, 3}}));
    EXPECT_TRUE(counterpart_coverage(g, 0).empty());
    EXPECT_THROW(counterpart_coverage(g, 9), Error);
}

TEST(Coverage, odd_ring_line_through_each_site) {
    for (std::size_t n : {3u, 5u, 7u, 9u}) {
        const auto cover = counterpart_coverage(make_ring(n, 1.0, 0.0), 0);
        EXPECT_EQ(cover.size(), (n - 1) / 2) << n;
    }
}

TEST(Report, involution_and_classification_round_trip) {
    const auto g = make_chain(5, 1.0);
    for (const auto& inv : find_involutions(g)) {
        const nlohmann::json j = inv;
        EXPECT_EQ(nlohmann::json(j.get<Involution>()), j);
    }
    const nlohmann::json c = classify(g, 2, 1, 1, 3);
    EXPECT_EQ(c.at("class"), "class-I");
    EXPECT_EQ(nlohmann::json(c.get<SymmetryClassification>()), c);
    const nlohmann::json pr = predicted_cmax(classify(g, 2, 1, 1, 3), diagonalize(g), 0.9);
    EXPECT_EQ(nlohmann::json(pr.get<CmaxPrediction>()), pr);
}

}  // namespace
