#pragma once

// Hamiltonians for XY and Heisenberg spin graphs.
//
//   XY:          sum_<ij> J_ij (sx_i sx_j + sy_i sy_j) + sum_i B_i sz_i
//   Heisenberg:  sum_<ij> J_ij (sx_i sx_j + sy_i sy_j + sz_i sz_j) + sum_i B_i sz_i
//
// Each unordered bond is counted once. The flux phase rides on the hopping
// part: sx sx + sy sy = 2 (s+_i s-_j e^{i phase(i->j)} + h.c.).
// Pauli convention: sz|up> = +|up>, an excitation is an up spin, and in the
// full-space basis bit k of the state index is set when site k is up.

#include <bit>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "spinbus/error.hpp"
#include "spinbus/graph.hpp"

namespace spinbus {

using Complex = std::complex<double>;

/// N x N matrix on the one-excitation basis |k> (site k up, rest down).
struct SingleExcHamiltonian {
    Eigen::MatrixXcd matrix;

    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// 2^N x 2^N matrix on computational product states.
struct FullSpaceHamiltonian {
    std::size_t n_sites = 0;
    Eigen::SparseMatrix<Complex> matrix;
};

inline constexpr std::size_t kFullSpaceMaxSites = 12;

/// Constant dropped by build_single_excitation: block = H_eff + c * I.
inline double dropped_constant(const SpinGraph& g) {
    double field_sum = 0.0;
    for (double b : g.fields()) field_sum += b;
    double coupling_sum = 0.0;
    for (const auto& b : g.bonds()) coupling_sum += b.coupling;
    return g.model() == Model::Heisenberg ? coupling_sum - field_sum : -field_sum;
}

inline SingleExcHamiltonian build_single_excitation(const SpinGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.n_sites());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) h(i, i) = 2.0 * g.field(static_cast<SiteId>(i));
    for (const auto& b : g.bonds()) {
        const auto i = static_cast<Eigen::Index>(b.i);
        const auto j = static_cast<Eigen::Index>(b.j);
        const Complex hop = 2.0 * b.coupling * std::polar(1.0, b.phase);
        h(i, j) += hop;
        h(j, i) += std::conj(hop);
        if (g.model() == Model::Heisenberg) {
            h(i, i) -= 2.0 * b.coupling;
            h(j, j) -= 2.0 * b.coupling;
        }
    }
    return {std::move(h)};
}

inline FullSpaceHamiltonian build_full_space(const SpinGraph& g) {
    const std::size_t n = g.n_sites();
    if (n > kFullSpaceMaxSites) {
        throw Error(ErrorKind::Resource, "full-space oracle limited to " + std::to_string(kFullSpaceMaxSites) +
                                             " sites, graph has " + std::to_string(n));
    }
    const std::uint64_t dim = std::uint64_t{1} << n;
    const bool heisenberg = g.model() == Model::Heisenberg;
    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(dim * (1 + g.bonds().size()));

    auto spin = [](std::uint64_t state, SiteId k) { return ((state >> k) & 1U) ? 1.0 : -1.0; };

    for (std::uint64_t s = 0; s < dim; ++s) {
        double diag = 0.0;
        for (SiteId k = 0; k < n; ++k) diag += g.field(k) * spin(s, k);
        if (heisenberg) {
            for (const auto& b : g.bonds()) diag += b.coupling * spin(s, b.i) * spin(s, b.j);
        }
        entries.emplace_back(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s), diag);

        // s+_i s-_j: j up and i down -> i up and j down.
        for (const auto& b : g.bonds()) {
            const bool i_up = (s >> b.i) & 1U;
            const bool j_up = (s >> b.j) & 1U;
            if (j_up && !i_up) {
                const std::uint64_t t = s ^ (std::uint64_t{1} << b.i) ^ (std::uint64_t{1} << b.j);
                const Complex hop = 2.0 * b.coupling * std::polar(1.0, b.phase);
                entries.emplace_back(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s), hop);
                entries.emplace_back(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t), std::conj(hop));
            }
        }
    }
    FullSpaceHamiltonian out;
    out.n_sites = n;
    out.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    out.matrix.setFromTriplets(entries.begin(), entries.end());
    return out;
}

/// max |([Sz_total, H])_ab|; zero certifies excitation-number conservation.
inline double check_excitation_conservation(const FullSpaceHamiltonian& h) {
    // Sz_total = 2 * popcount - N; the -N offset cancels in the commutator.
    auto sz = [](Eigen::Index state) { return 2.0 * std::popcount(static_cast<std::uint64_t>(state)); };
    double worst = 0.0;
    for (Eigen::Index col = 0; col < h.matrix.outerSize(); ++col) {
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(h.matrix, col); it; ++it) {
            worst = std::max(worst, std::abs((sz(it.row()) - sz(it.col())) * it.value()));
        }
    }
    return worst;
}

inline constexpr double kLeakageTolerance = 1e-10;

/// One-excitation block ordered by flipped site. Throws on sector leakage.
inline SingleExcHamiltonian extract_single_excitation_block(const FullSpaceHamiltonian& h) {
    const auto n = static_cast<Eigen::Index>(h.n_sites);
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, n);
    double leak = 0.0;
    for (Eigen::Index col = 0; col < h.matrix.outerSize(); ++col) {
        const bool col_in = std::popcount(static_cast<std::uint64_t>(col)) == 1;
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(h.matrix, col); it; ++it) {
            const bool row_in = std::popcount(static_cast<std::uint64_t>(it.row())) == 1;
            if (row_in && col_in) {
                block(std::countr_zero(static_cast<std::uint64_t>(it.row())),
                      std::countr_zero(static_cast<std::uint64_t>(col))) += it.value();
            } else if (row_in != col_in) {
                leak = std::max(leak, std::abs(it.value()));
            }
        }
    }
    if (leak > kLeakageTolerance) {
        throw Error(ErrorKind::BlockLeakage,
                    "one-excitation sector couples to other sectors, max off-sector element " + std::to_string(leak));
    }
    return {std::move(block)};
}

/// ||A - B - (tr(A - B)/N) I||_max: difference after removing a global constant.
inline double aligned_max_deviation(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd d = a - b;
    const Complex shift = d.trace() / static_cast<double>(d.rows());
    d.diagonal().array() -= shift;
    return d.cwiseAbs().maxCoeff();
}

}  // namespace spinbus
