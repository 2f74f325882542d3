#pragma once

#include "linamp/gaussian_state.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace linamp {

/// Affine Gaussian unitary on quadratures: v -> S v + d with S symplectic.
class SymplecticOp {
  public:
    explicit SymplecticOp(Mat S) : SymplecticOp(std::move(S), Vec()) {}

    SymplecticOp(Mat S, Vec d) : S_(std::move(S)), d_(std::move(d)) {
        if (S_.rows() != S_.cols() || S_.rows() % 2 != 0 || S_.rows() == 0)
            throw std::invalid_argument("SymplecticOp: matrix must be even square");
        if (d_.size() == 0) d_ = Vec::Zero(S_.rows());
        if (d_.size() != S_.rows())
            throw std::invalid_argument("SymplecticOp: displacement length does not match matrix");
        Mat omega = symplectic_form(n_modes());
        double err = (S_ * omega * S_.transpose() - omega).cwiseAbs().maxCoeff();
        if (err > kSymmetryTol)
            throw std::invalid_argument("SymplecticOp: S Omega S^T != Omega (error " +
                                        std::to_string(err) + ")");
    }

    int n_modes() const { return static_cast<int>(S_.rows() / 2); }
    const Mat& matrix() const { return S_; }
    const Vec& shift() const { return d_; }

    /// Composition: (this * other) acts as other first, then this.
    SymplecticOp operator*(const SymplecticOp& other) const {
        if (n_modes() != other.n_modes())
            throw std::invalid_argument("SymplecticOp: mode-count mismatch in composition");
        return SymplecticOp(S_ * other.S_, S_ * other.d_ + d_);
    }

  private:
    Mat S_;
    Vec d_;
};

/// Beam splitter with power transmission T. First output keeps the
/// transmitted part of the first input:
///   out0 = sqrt(T) in0 - sqrt(R) in1
///   out1 = sqrt(R) in0 + sqrt(T) in1,  R = 1 - T.
inline SymplecticOp beam_splitter(double transmission) {
    if (transmission < 0.0 || transmission > 1.0)
        throw std::invalid_argument("beam_splitter: transmission must lie in [0, 1]");
    double t = std::sqrt(transmission), r = std::sqrt(1.0 - transmission);
    Mat S = Mat::Zero(4, 4);
    for (int q = 0; q < 2; ++q) {  // same mixing for x and p
        S(0 + q, 0 + q) = t;
        S(0 + q, 2 + q) = -r;
        S(2 + q, 0 + q) = r;
        S(2 + q, 2 + q) = t;
    }
    return SymplecticOp(std::move(S));
}

/// Single-mode phase-space rotation by theta:
///   x -> x cos(theta) - p sin(theta),  p -> x sin(theta) + p cos(theta).
inline SymplecticOp phase_shift(double theta) {
    Mat S(2, 2);
    S << std::cos(theta), -std::sin(theta),
         std::sin(theta), std::cos(theta);
    return SymplecticOp(std::move(S));
}

/// Apply an op that covers every mode of the state.
inline GaussianState apply(const GaussianState& state, const SymplecticOp& op) {
    if (op.n_modes() != state.n_modes())
        throw std::invalid_argument("apply: op covers " + std::to_string(op.n_modes()) +
                                    " modes but state has " + std::to_string(state.n_modes()));
    Vec mean = op.matrix() * state.mean() + op.shift();
    Mat cov = op.matrix() * state.cov() * op.matrix().transpose();
    return GaussianState(std::move(mean), std::move(cov));
}

/// Apply an op to a subset of modes (in the given order); the rest are
/// untouched. Mode list length must match the op's mode count.
inline GaussianState apply(const GaussianState& state, const SymplecticOp& op, std::span<const int> modes) {
    if (static_cast<int>(modes.size()) != op.n_modes())
        throw std::invalid_argument("apply: op expects " + std::to_string(op.n_modes()) +
                                    " modes, got " + std::to_string(modes.size()));
    std::vector<int> seen;
    for (int m : modes) {
        state.check_mode(m);
        for (int s : seen)
            if (s == m) throw std::invalid_argument("apply: duplicate mode in mode list");
        seen.push_back(m);
    }
    int n = state.n_modes();
    Mat S = Mat::Identity(2 * n, 2 * n);
    Vec d = Vec::Zero(2 * n);
    for (int a = 0; a < op.n_modes(); ++a) {
        d.segment<2>(x_index(modes[a])) = op.shift().segment<2>(2 * a);
        for (int b = 0; b < op.n_modes(); ++b)
            S.block<2, 2>(x_index(modes[a]), x_index(modes[b])) = op.matrix().block<2, 2>(2 * a, 2 * b);
    }
    // Off-block identity entries overwritten above only within the selected
    // modes, so S stays symplectic on the full space.
    Vec mean = S * state.mean() + d;
    Mat cov = S * state.cov() * S.transpose();
    return GaussianState(std::move(mean), std::move(cov));
}

inline GaussianState apply(const GaussianState& state, const SymplecticOp& op,
                           std::initializer_list<int> modes) {
    return apply(state, op, std::span<const int>(modes.begin(), modes.size()));
}

}  // namespace linamp
