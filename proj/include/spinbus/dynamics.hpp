#pragma once

// Exact one-excitation dynamics by eigendecomposition:
//   f_ij(t) = <i| exp(-i H t) |j> = sum_k V_ik exp(-i lambda_k t) conj(V_jk).
// Degenerate spectra need no special treatment: any orthonormal eigenbasis
// yields the same f.

#include <complex>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spinbus/error.hpp"
#include "spinbus/format.hpp"
#include "spinbus/hamiltonian.hpp"
#include "spinbus/search.hpp"

namespace spinbus {

inline constexpr double kHermitianTolerance = 1e-12;

/// f(t) with entry (i, j) = f_ij(t).
struct AmplitudeMatrix {
    double t = 0.0;
    Eigen::MatrixXcd f;

    [[nodiscard]] Complex operator()(SiteId i, SiteId j) const {
        return f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(f.rows()); }
};

class Propagator {
public:
    Propagator(Eigen::VectorXd eigenvalues, Eigen::MatrixXcd eigenvectors, std::uint64_t fingerprint)
        : values_(std::move(eigenvalues)), vectors_(std::move(eigenvectors)), fingerprint_(fingerprint) {}

    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(values_.size()); }
    [[nodiscard]] const Eigen::VectorXd& eigenvalues() const noexcept { return values_; }
    [[nodiscard]] const Eigen::MatrixXcd& eigenvectors() const noexcept { return vectors_; }
    /// FNV-1a hash of the Hamiltonian this propagator was built from.
    [[nodiscard]] std::uint64_t fingerprint() const noexcept { return fingerprint_; }

    [[nodiscard]] AmplitudeMatrix amplitudes(double t) const {
        const Eigen::VectorXcd phases = (Complex(0.0, -t) * values_.cast<Complex>()).array().exp();
        return {t, vectors_ * phases.asDiagonal() * vectors_.adjoint()};
    }

    /// Single entry f_ij(t) in O(N).
    [[nodiscard]] Complex amplitude(SiteId i, SiteId j, double t) const {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        Complex acc = 0.0;
        for (Eigen::Index k = 0; k < values_.size(); ++k) {
            acc += vectors_(ii, k) * std::polar(1.0, -values_(k) * t) * std::conj(vectors_(jj, k));
        }
        return acc;
    }

    /// exp(-i H t) psi.
    [[nodiscard]] Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi, double t) const {
        Eigen::VectorXcd c = vectors_.adjoint() * psi;
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -values_(k) * t);
        return vectors_ * c;
    }

private:
    Eigen::VectorXd values_;
    Eigen::MatrixXcd vectors_;
    std::uint64_t fingerprint_;
};

namespace detail {

inline std::uint64_t fnv1a(const Eigen::MatrixXcd& m) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](double x) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xFFU;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<double>(m.rows()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            mix(m(i, j).real());
            mix(m(i, j).imag());
        }
    }
    return h;
}

}  // namespace detail

/// Spectral decomposition with ascending eigenvalues.
inline Propagator diagonalize(const SingleExcHamiltonian& h) {
    const auto& m = h.matrix;
    if (m.rows() == 0 || m.rows() != m.cols()) throw Error(ErrorKind::InvalidInput, "Hamiltonian must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kHermitianTolerance * scale) {
        throw Error(ErrorKind::InvalidInput, "Hamiltonian is not Hermitian (max |H - H^dagger| = " +
                                                 std::to_string(asym) + ")");
    }
    const Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::InvalidInput, "eigensolver did not converge");
    return Propagator(solver.eigenvalues(), solver.eigenvectors(), detail::fnv1a(m));
}

inline Propagator diagonalize(const SpinGraph& g) { return diagonalize(build_single_excitation(g)); }

inline AmplitudeMatrix transition_amplitudes(const Propagator& p, double t) {
    if (!std::isfinite(t)) throw Error(ErrorKind::InvalidInput, "time must be finite");
    return p.amplitudes(t);
}

struct SitePair {
    SiteId i = 0;
    SiteId j = 0;
    friend bool operator==(const SitePair&, const SitePair&) = default;
};

struct AmplitudeRow {
    double t = 0.0;
    SiteId i = 0;
    SiteId j = 0;
    Complex f;
    double abs2 = 0.0;
};

/// One row per (t, pair), time-major.
inline std::vector<AmplitudeRow> amplitude_series(const Propagator& p, std::span<const double> times,
                                                  std::span<const SitePair> pairs) {
    if (times.empty()) throw Error(ErrorKind::InvalidInput, "amplitude series needs at least one time");
    for (const auto& pr : pairs) {
        if (pr.i >= p.dim() || pr.j >= p.dim()) {
            throw Error(ErrorKind::InvalidInput, "pair (" + std::to_string(pr.i) + "," + std::to_string(pr.j) +
                                                     ") outside [0, " + std::to_string(p.dim()) + ")");
        }
    }
    std::vector<AmplitudeRow> rows(times.size() * pairs.size());
    parallel_for(times.size(), [&](std::size_t k) {
        const auto f = p.amplitudes(times[k]);
        for (std::size_t q = 0; q < pairs.size(); ++q) {
            const Complex v = f(pairs[q].i, pairs[q].j);
            rows[k * pairs.size() + q] = {times[k], pairs[q].i, pairs[q].j, v, std::norm(v)};
        }
    });
    return rows;
}

inline void write_amplitude_csv(std::ostream& os, std::span<const AmplitudeRow> rows) {
    os << "t,i,j,re_f,im_f,abs2\n";
    for (const auto& r : rows) {
        os << format_real(r.t) << ',' << r.i << ',' << r.j << ',' << format_real(r.f.real()) << ','
           << format_real(r.f.imag()) << ',' << format_real(r.abs2) << '\n';
    }
}

/// max over [0, horizon] of |f_ij(t)|: grid of `steps` points plus Brent polish.
inline ScalarMax max_amplitude_over_time(const Propagator& p, SiteId i, SiteId j, double horizon,
                                         std::size_t steps) {
    return maximize_scalar([&](double t) { return std::abs(p.amplitude(i, j, t)); }, 0.0, horizon, steps);
}

}  // namespace spinbus
