#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace linamp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPhysicalityTol = 1e-9;

/// Thrown when a covariance matrix fails the uncertainty bound (or a
/// variance correction produces one that would).
struct UnphysicalStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline int x_index(int mode) { return 2 * mode; }
inline int p_index(int mode) { return 2 * mode + 1; }

/// Block-diagonal symplectic form: 2x2 blocks [[0,1],[-1,0]] per mode.
inline Mat symplectic_form(int n_modes) {
    Mat omega = Mat::Zero(2 * n_modes, 2 * n_modes);
    for (int m = 0; m < n_modes; ++m) {
        omega(x_index(m), p_index(m)) = 1.0;
        omega(p_index(m), x_index(m)) = -1.0;
    }
    return omega;
}

/// Multimode Gaussian state: mean vector and covariance matrix over the
/// quadratures (x_1, p_1, ..., x_N, p_N).
///
/// Units are shot-noise units, x = a + a^dag and p = -i(a - a^dag), so the
/// vacuum has unit variance per quadrature. Values are immutable after
/// construction; every operation returns a new state.
class GaussianState {
  public:
    GaussianState(Vec mean, Mat cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
        if (mean_.size() % 2 != 0 || mean_.size() == 0)
            throw std::invalid_argument("GaussianState: mean length must be a positive multiple of 2");
        n_modes_ = static_cast<int>(mean_.size() / 2);
        if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size())
            throw std::invalid_argument("GaussianState: covariance shape does not match mean length");
        double asym = (cov_ - cov_.transpose()).cwiseAbs().maxCoeff();
        if (asym > kSymmetryTol)
            throw std::invalid_argument("GaussianState: covariance asymmetric by " + std::to_string(asym));
        cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();
    }

    int n_modes() const { return n_modes_; }
    const Vec& mean() const { return mean_; }
    const Mat& cov() const { return cov_; }

    Eigen::Vector2d mode_mean(int mode) const {
        check_mode(mode);
        return mean_.segment<2>(x_index(mode));
    }
    Eigen::Matrix2d mode_cov(int mode) const {
        check_mode(mode);
        return cov_.block<2, 2>(x_index(mode), x_index(mode));
    }

    void check_mode(int mode) const {
        if (mode < 0 || mode >= n_modes_)
            throw std::out_of_range("mode index " + std::to_string(mode) + " out of range for " +
                                    std::to_string(n_modes_) + " modes");
    }

  private:
    Vec mean_;
    Mat cov_;
    int n_modes_;
};

/// n-mode vacuum: zero mean, identity covariance.
inline GaussianState vacuum(int n_modes) {
    if (n_modes < 1) throw std::invalid_argument("vacuum: need at least one mode");
    return GaussianState(Vec::Zero(2 * n_modes), Mat::Identity(2 * n_modes, 2 * n_modes));
}

/// n-mode thermal state with the given per-quadrature variance (>= one for a
/// physical state; not enforced here so deliberately bad inputs can be probed).
inline GaussianState thermal(int n_modes, double variance) {
    if (n_modes < 1) throw std::invalid_argument("thermal: need at least one mode");
    return GaussianState(Vec::Zero(2 * n_modes), variance * Mat::Identity(2 * n_modes, 2 * n_modes));
}

/// Product of coherent states; mode k has mean (2 Re alpha_k, 2 Im alpha_k).
inline GaussianState coherent(std::span<const std::complex<double>> alphas) {
    if (alphas.empty()) throw std::invalid_argument("coherent: amplitude list is empty");
    int n = static_cast<int>(alphas.size());
    Vec mean(2 * n);
    for (int k = 0; k < n; ++k) {
        mean(x_index(k)) = 2.0 * alphas[k].real();
        mean(p_index(k)) = 2.0 * alphas[k].imag();
    }
    return GaussianState(std::move(mean), Mat::Identity(2 * n, 2 * n));
}

inline GaussianState coherent(std::initializer_list<std::complex<double>> alphas) {
    return coherent(std::span<const std::complex<double>>(alphas.begin(), alphas.size()));
}

inline GaussianState coherent(std::complex<double> alpha) { return coherent({alpha}); }

/// Two-mode squeezed vacuum: variances cosh(2r), x-x correlation +sinh(2r),
/// p-p correlation -sinh(2r). Pure for every r >= 0.
inline GaussianState two_mode_squeezed(double r) {
    if (r < 0.0) throw std::invalid_argument("two_mode_squeezed: r must be >= 0");
    double c = std::cosh(2.0 * r), s = std::sinh(2.0 * r);
    Mat cov(4, 4);
    cov << c, 0, s, 0,
           0, c, 0, -s,
           s, 0, c, 0,
           0, -s, 0, c;
    return GaussianState(Vec::Zero(4), std::move(cov));
}

/// Tensor product; modes of `b` follow the modes of `a`.
inline GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    int na = a.n_modes(), nb = b.n_modes();
    Vec mean(2 * (na + nb));
    mean << a.mean(), b.mean();
    Mat cov = Mat::Zero(2 * (na + nb), 2 * (na + nb));
    cov.topLeftCorner(2 * na, 2 * na) = a.cov();
    cov.bottomRightCorner(2 * nb, 2 * nb) = b.cov();
    return GaussianState(std::move(mean), std::move(cov));
}

/// Phase-space displacement of one mode; covariance unchanged.
inline GaussianState displace(const GaussianState& state, int mode, double dx, double dp) {
    state.check_mode(mode);
    Vec mean = state.mean();
    mean(x_index(mode)) += dx;
    mean(p_index(mode)) += dp;
    return GaussianState(std::move(mean), state.cov());
}

/// Pure loss of power efficiency eta on one mode: mean scales by sqrt(eta),
/// the mode's covariance block relaxes toward the vacuum, cross blocks scale
/// by sqrt(eta). Composes as eta_1 * eta_2.
inline GaussianState loss_channel(const GaussianState& state, int mode, double eta) {
    state.check_mode(mode);
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("loss_channel: eta must lie in [0, 1]");
    int n = state.n_modes();
    Vec scale = Vec::Ones(2 * n);
    scale(x_index(mode)) = scale(p_index(mode)) = std::sqrt(eta);
    Vec mean = scale.asDiagonal() * state.mean();
    Mat cov = scale.asDiagonal() * state.cov() * scale.asDiagonal();
    cov(x_index(mode), x_index(mode)) += 1.0 - eta;
    cov(p_index(mode), p_index(mode)) += 1.0 - eta;
    return GaussianState(std::move(mean), std::move(cov));
}

/// Restriction to the listed modes, in the listed order.
inline GaussianState partial_trace(const GaussianState& state, std::span<const int> keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    std::vector<int> seen;
    for (int m : keep) {
        state.check_mode(m);
        if (std::find(seen.begin(), seen.end(), m) != seen.end())
            throw std::invalid_argument("partial_trace: duplicate mode in keep set");
        seen.push_back(m);
    }
    int nk = static_cast<int>(keep.size());
    Vec mean(2 * nk);
    Mat cov(2 * nk, 2 * nk);
    for (int a = 0; a < nk; ++a) {
        mean.segment<2>(2 * a) = state.mean().segment<2>(x_index(keep[a]));
        for (int b = 0; b < nk; ++b)
            cov.block<2, 2>(2 * a, 2 * b) = state.cov().block<2, 2>(x_index(keep[a]), x_index(keep[b]));
    }
    return GaussianState(std::move(mean), std::move(cov));
}

inline GaussianState partial_trace(const GaussianState& state, std::initializer_list<int> keep) {
    return partial_trace(state, std::span<const int>(keep.begin(), keep.size()));
}

/// Symplectic spectrum of a covariance matrix: the N moduli of the (paired)
/// eigenvalues of Omega * cov, ascending. Physical states have all >= 1.
inline std::vector<double> symplectic_eigenvalues(const Mat& cov) {
    if (cov.rows() != cov.cols() || cov.rows() % 2 != 0)
        throw std::invalid_argument("symplectic_eigenvalues: need an even square matrix");
    int n = static_cast<int>(cov.rows() / 2);
    Eigen::EigenSolver<Mat> solver(symplectic_form(n) * cov, /*computeEigenvectors=*/false);
    std::vector<double> moduli(2 * n);
    for (int i = 0; i < 2 * n; ++i) moduli[i] = std::abs(solver.eigenvalues()(i));
    std::sort(moduli.begin(), moduli.end());
    std::vector<double> nus(n);
    for (int i = 0; i < n; ++i) nus[i] = (moduli[2 * i] + moduli[2 * i + 1]) / 2.0;
    return nus;
}

struct PhysicalityReport {
    double min_symplectic_eigenvalue = 0.0;
    double min_cov_eigenvalue = 0.0;
    bool physical = false;
    double tolerance = kPhysicalityTol;
};

/// Uncertainty-principle check: covariance positive semidefinite and all
/// symplectic eigenvalues >= 1 - tolerance. (The moduli in
/// symplectic_eigenvalues alone cannot see a negative-definite covariance.)
inline PhysicalityReport check_physical(const GaussianState& state, double tolerance = kPhysicalityTol) {
    auto nus = symplectic_eigenvalues(state.cov());
    double nu_min = *std::min_element(nus.begin(), nus.end());
    Eigen::SelfAdjointEigenSolver<Mat> es(state.cov(), Eigen::EigenvaluesOnly);
    double lambda_min = es.eigenvalues()(0);
    bool ok = nu_min >= 1.0 - tolerance && lambda_min >= -tolerance;
    return PhysicalityReport{nu_min, lambda_min, ok, tolerance};
}

/// Gate for user-supplied states entering a pipeline. The tolerance is
/// scaled by the covariance norm: beyond ~1e7 shot units (squeezing r ~ 8)
/// a double-precision covariance cannot even represent a 1e-9 physicality
/// margin, and an absolute test would falsely reject legitimate states.
inline const GaussianState& require_physical(const GaussianState& state, const std::string& context) {
    double scale = std::max(1.0, state.cov().cwiseAbs().maxCoeff());
    auto report = check_physical(state, kPhysicalityTol * scale);
    if (!report.physical)
        throw UnphysicalStateError(context + ": state violates the uncertainty bound (min symplectic "
                                   "eigenvalue " +
                                   std::to_string(report.min_symplectic_eigenvalue) +
                                   ", min covariance eigenvalue " +
                                   std::to_string(report.min_cov_eigenvalue) + ")");
    return state;
}

}  // namespace linamp
