// Copyright 2026 The qemit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense-matrix reference implementations used as independent oracles.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <string>

#include "qemit/channels.hpp"
#include "qemit/pauli.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using cd = std::complex<double>;

inline Mat letter_matrix(char c) {
    Mat m(2, 2);
    switch (c) {
        case 'I':
            m << 1, 0, 0, 1;
            break;
        case 'X':
            m << 0, 1, 1, 0;
            break;
        case 'Y':
            m << 0, cd(0, -1), cd(0, 1), 0;
            break;
        default:
            m << 1, 0, 0, -1;
    }
    return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

/// Matrix of a Pauli string in the basis where qubit q is bit q of the index
/// (qubit n-1 is the leftmost Kronecker factor).
inline Mat pauli_matrix(const qemit::PauliString& p) {
    Mat m = Mat::Identity(1, 1);
    for (int q = static_cast<int>(p.n_qubits()) - 1; q >= 0; --q) m = kron(m, letter_matrix(p.letter(q)));
    return m;
}

inline Mat apply_channel(const qemit::PauliChannel& ch, const Mat& rho) {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const auto& [p, w] : ch.terms()) {
        Mat g = pauli_matrix(p);
        out += w * g * rho * g.adjoint();
    }
    return out;
}

inline Mat random_density(unsigned n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    size_t d = size_t{1} << n;
    Mat a(d, d);
    for (size_t i = 0; i < d; ++i) {
        for (size_t j = 0; j < d; ++j) a(i, j) = cd(nd(rng), nd(rng));
    }
    Mat rho = a * a.adjoint();
    return rho / rho.trace();
}

/// f_G = Tr(G C(G)) / 2^n computed from matrices.
inline double ptm_eigenvalue(const qemit::PauliChannel& ch, const qemit::PauliString& g) {
    Mat gm = pauli_matrix(g);
    Mat img = apply_channel(ch, gm);
    return (gm * img).trace().real() / static_cast<double>(gm.rows());
}

}  // namespace oracle
