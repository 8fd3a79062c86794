// Copyright 2026 The crnsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

#include "crn/rng.hpp"

namespace crn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
// Conjugate-symmetric by construction at every call site; not enforced by type.
using HermitianMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

class NotPositiveDefinite : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// rows x cols matrix of i.i.d. CN(0,1) entries, filled in column-major order.
inline ComplexMatrix sample_cn_matrix(RandomStream stream, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("sample_cn_matrix: negative dimension");
  StreamEngine engine(stream);
  ComplexMatrix out(rows, cols);
  Complex* data = out.data();
  for (Eigen::Index k = 0; k < rows * cols; ++k) data[k] = engine.complex_normal();
  return out;
}

/// Haar-distributed m x m unitary: QR of a CN(0,1) matrix with the phases of
/// R's diagonal moved into Q (Mezzadri's correction).
inline ComplexMatrix sample_haar_beams(RandomStream stream, Eigen::Index m) {
  if (m < 1) throw std::invalid_argument("sample_haar_beams: m must be >= 1");
  const ComplexMatrix z = sample_cn_matrix(stream, m, m);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, m);
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < m; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

/// log det of a Hermitian positive definite matrix, in nats, from its
/// Cholesky factor: 2 * sum(log L_ii).
inline double logdet_hpd(const HermitianMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("logdet_hpd: matrix is not square");
  if (a.rows() == 0) return 0.0;
  Eigen::LLT<ComplexMatrix> llt(a);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("logdet_hpd: matrix is not positive definite");
  const auto& l = llt.matrixLLT();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double pivot = l(i, i).real();
    if (!(pivot > 0.0)) throw NotPositiveDefinite("logdet_hpd: non-positive pivot");
    sum += std::log(pivot);
  }
  return 2.0 * sum;
}

/// diag(G Q G^H) as real numbers.
inline RealVector diag_quadratic(const ComplexMatrix& g, const HermitianMatrix& q) {
  if (g.cols() != q.rows() || q.rows() != q.cols())
    throw std::invalid_argument("diag_quadratic: dimension mismatch");
  return (g * q).cwiseProduct(g.conjugate()).rowwise().sum().real();
}

}  // namespace crn
