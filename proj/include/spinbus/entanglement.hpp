#pragma once

// Pairwise entanglement generated from an encoded one-excitation state
//   |psi(0)> = alpha |mu> + beta |nu>.
// For target sites (m, n):
//   A = alpha f_m,mu + beta f_m,nu,   B = alpha f_n,mu + beta f_n,nu,
// the reduced state lives on {|11>, |10>, |01>, |00>} and its concurrence is
// 2|A||B|.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "spinbus/dynamics.hpp"
#include "spinbus/error.hpp"

namespace spinbus {

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kStateTolerance = 1e-10;

class Encoding {
public:
    Encoding(SiteId mu, SiteId nu, Complex alpha, Complex beta) : mu_(mu), nu_(nu), alpha_(alpha), beta_(beta) {
        const double norm = std::norm(alpha) + std::norm(beta);
        if (std::abs(norm - 1.0) > kNormTolerance) {
            throw Error(ErrorKind::InvalidInput,
                        "encoding must satisfy |alpha|^2 + |beta|^2 = 1 (got " + std::to_string(norm) + ")");
        }
        if (mu == nu && beta != Complex(0.0)) {
            throw Error(ErrorKind::InvalidInput, "encoded sites must differ unless beta = 0");
        }
    }

    /// Disentangled encoding: the excitation starts on `mu` alone.
    static Encoding single(SiteId mu) { return Encoding(mu, mu, 1.0, 0.0); }

    /// alpha = a, beta = sqrt(1 - a^2) e^{i phase}, a in [0, 1].
    static Encoding from_polar(SiteId mu, SiteId nu, double alpha_abs, double relative_phase) {
        if (!(alpha_abs >= 0.0 && alpha_abs <= 1.0)) {
            throw Error(ErrorKind::InvalidInput, "|alpha| must lie in [0, 1]");
        }
        const double beta_abs = std::sqrt(std::max(0.0, 1.0 - alpha_abs * alpha_abs));
        return Encoding(mu, nu, alpha_abs, std::polar(beta_abs, relative_phase));
    }

    [[nodiscard]] SiteId mu() const noexcept { return mu_; }
    [[nodiscard]] SiteId nu() const noexcept { return nu_; }
    [[nodiscard]] Complex alpha() const noexcept { return alpha_; }
    [[nodiscard]] Complex beta() const noexcept { return beta_; }

    /// Concurrence of the encoded pair at t = 0.
    [[nodiscard]] double initial_concurrence() const { return mu_ == nu_ ? 0.0 : 2.0 * std::abs(alpha_ * beta_); }

private:
    SiteId mu_;
    SiteId nu_;
    Complex alpha_;
    Complex beta_;
};

struct PairAmplitudes {
    Complex A;
    Complex B;
    SiteId m = 0;
    SiteId n = 0;
    double t = 0.0;
};

/// rho on {|11>, |10>, |01>, |00>}, first qubit m, second n.
struct TwoQubitState {
    Eigen::Matrix4cd rho;
};

namespace detail {

inline void check_target(const AmplitudeMatrix& f, SiteId m, SiteId n) {
    if (m == n) throw Error(ErrorKind::InvalidTarget, "target sites must differ (m = n = " + std::to_string(m) + ")");
    if (m >= f.dim() || n >= f.dim()) throw Error(ErrorKind::InvalidTarget, "target site outside the graph");
}

inline void check_encoding(const AmplitudeMatrix& f, const Encoding& e) {
    if (e.mu() >= f.dim() || e.nu() >= f.dim()) throw Error(ErrorKind::InvalidInput, "encoded site outside the graph");
}

}  // namespace detail

inline PairAmplitudes pair_amplitudes(const AmplitudeMatrix& f, const Encoding& e, SiteId m, SiteId n) {
    detail::check_target(f, m, n);
    detail::check_encoding(f, e);
    const Complex a = e.alpha() * f(m, e.mu()) + e.beta() * f(m, e.nu());
    const Complex b = e.alpha() * f(n, e.mu()) + e.beta() * f(n, e.nu());
    return {a, b, m, n, f.t};
}

inline TwoQubitState pair_state(const PairAmplitudes& pa) {
    const double pa2 = std::norm(pa.A);
    const double pb2 = std::norm(pa.B);
    if (pa2 + pb2 > 1.0 + kStateTolerance) {
        throw Error(ErrorKind::InvalidState, "|A|^2 + |B|^2 exceeds 1 (" + std::to_string(pa2 + pb2) + ")");
    }
    TwoQubitState s{Eigen::Matrix4cd::Zero()};
    s.rho(1, 1) = pa2;
    s.rho(1, 2) = pa.A * std::conj(pa.B);
    s.rho(2, 1) = pa.B * std::conj(pa.A);
    s.rho(2, 2) = pb2;
    s.rho(3, 3) = 1.0 - pa2 - pb2;
    return s;
}

inline double concurrence_closed_form(const PairAmplitudes& pa) { return 2.0 * std::abs(pa.A) * std::abs(pa.B); }

/// Wootters concurrence max(0, l1 - l2 - l3 - l4) of an arbitrary two-qubit
/// state. With rho = W W^dagger (W columns sqrt(p_k) psi_k) the l_k are the
/// singular values of W^T (sy x sy) W, which keeps vanishing l_k at roundoff
/// level instead of the sqrt(eps) an eigenvalue square root would give.
inline double concurrence_wootters(const TwoQubitState& state) {
    const auto& rho = state.rho;
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStateTolerance) {
        throw Error(ErrorKind::InvalidState, "density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - Complex(1.0)) > kStateTolerance) {
        throw Error(ErrorKind::InvalidState, "density matrix trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (rho + rho.adjoint()));
    const Eigen::Vector4d p = es.eigenvalues();
    if (p.minCoeff() < -kStateTolerance) {
        throw Error(ErrorKind::InvalidState,
                    "density matrix is not positive semidefinite (min eigenvalue " + std::to_string(p.minCoeff()) + ")");
    }

    const double cutoff = 1e-13 * std::max(p.maxCoeff(), 0.0);
    Eigen::Matrix4cd w = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 4; ++k) {
        if (p(k) > cutoff) w.col(k) = std::sqrt(p(k)) * es.eigenvectors().col(k);
    }
    Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
    flip(0, 3) = -1.0;
    flip(1, 2) = 1.0;
    flip(2, 1) = 1.0;
    flip(3, 0) = -1.0;
    const Eigen::Matrix4cd tau = w.transpose() * flip * w;
    const Eigen::Vector4d l = Eigen::JacobiSVD<Eigen::Matrix4cd>(tau).singularValues();
    return std::clamp(l(0) - l(1) - l(2) - l(3), 0.0, 1.0);
}

/// Binary-entropy entanglement of formation for a given concurrence.
inline double entanglement_of_formation(double concurrence) {
    const double x = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - concurrence * concurrence)));
    auto h = [](double q) { return q <= 0.0 || q >= 1.0 ? 0.0 : -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q); };
    return h(x);
}

/// The four products whose sum gives AB:
///   alpha^2 f_m,mu f_n,mu,  alpha beta f_m,mu f_n,nu,  alpha beta f_m,nu f_n,mu,  beta^2 f_m,nu f_n,nu.
struct FourTerms {
    std::array<Complex, 4> terms{};
    std::array<double, 4> magnitudes{};
    double concurrence = 0.0;  // 2 |sum of terms|
};

inline FourTerms four_term_decomposition(const AmplitudeMatrix& f, const Encoding& e, SiteId m, SiteId n) {
    detail::check_target(f, m, n);
    detail::check_encoding(f, e);
    const Complex a = e.alpha(), b = e.beta();
    const Complex fmu_m = f(m, e.mu()), fmu_n = f(n, e.mu());
    const Complex fnu_m = f(m, e.nu()), fnu_n = f(n, e.nu());
    FourTerms out;
    out.terms = {a * a * fmu_m * fmu_n, a * b * fmu_m * fnu_n, a * b * fnu_m * fmu_n, b * b * fnu_m * fnu_n};
    Complex sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        out.magnitudes[k] = std::abs(out.terms[k]);
        sum += out.terms[k];
    }
    out.concurrence = 2.0 * std::abs(sum);
    return out;
}

/// Concurrence between m and n at time t for encoding e.
inline double concurrence_at(const Propagator& p, const Encoding& e, SiteId m, SiteId n, double t) {
    const Complex a = e.alpha() * p.amplitude(m, e.mu(), t) + e.beta() * p.amplitude(m, e.nu(), t);
    const Complex b = e.alpha() * p.amplitude(n, e.mu(), t) + e.beta() * p.amplitude(n, e.nu(), t);
    return 2.0 * std::abs(a) * std::abs(b);
}

}  // namespace spinbus
