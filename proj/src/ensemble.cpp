#include "cdpr/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace cdpr {

SamplingMatrix::SamplingMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

SamplingMatrix SamplingMatrix::from_rows(const std::vector<ComplexVec>& rows) {
  if (rows.empty()) throw std::invalid_argument("SamplingMatrix: no rows");
  const std::size_t n = rows.front().size();
  SamplingMatrix a(rows.size(), n);
  for (std::size_t m = 0; m < rows.size(); ++m) {
    if (rows[m].size() != n) throw std::invalid_argument("SamplingMatrix: ragged rows");
    for (std::size_t j = 0; j < n; ++j) a.at(m, j) = rows[m][j];
  }
  return a;
}

ComplexVec SamplingMatrix::row(std::size_t m) const {
  ComplexVec out(cols_);
  for (std::size_t j = 0; j < cols_; ++j) out[j] = at(m, j);
  return out;
}

ComplexVec SamplingMatrix::apply(std::span<const cplx> x) const {
  if (x.size() != cols_) throw std::invalid_argument("SamplingMatrix::apply: length mismatch");
  ComplexVec z(rows_, cplx{0.0, 0.0});
  for (std::size_t j = 0; j < cols_; ++j) {
    const cplx xj = x[j];
    if (xj == cplx{0.0, 0.0}) continue;
    const cplx* col = data_.data() + j * rows_;
    for (std::size_t m = 0; m < rows_; ++m) z[m] += std::conj(col[m]) * xj;
  }
  return z;
}

ComplexVec SamplingMatrix::apply_adjoint(std::span<const cplx> v) const {
  if (v.size() != rows_) {
    throw std::invalid_argument("SamplingMatrix::apply_adjoint: length mismatch");
  }
  ComplexVec out(cols_);
  for (std::size_t j = 0; j < cols_; ++j) {
    const cplx* col = data_.data() + j * rows_;
    cplx s{0.0, 0.0};
    for (std::size_t m = 0; m < rows_; ++m) s += col[m] * v[m];
    out[j] = s;
  }
  return out;
}

MeasurementEnsemble::MeasurementEnsemble(SamplingMatrix vectors, RealVec intensities)
    : vectors_(std::move(vectors)), intensities_(std::move(intensities)) {
  if (vectors_.rows() == 0 || vectors_.cols() == 0) {
    throw std::invalid_argument("MeasurementEnsemble: M and N must be at least 1");
  }
  if (intensities_.size() != vectors_.rows()) {
    throw std::invalid_argument("MeasurementEnsemble: intensity count differs from M");
  }
  for (double b : intensities_) {
    if (!std::isfinite(b)) throw std::invalid_argument("MeasurementEnsemble: non-finite b");
    intensity_energy_ += b * b;
    intensity_l1_ += std::abs(b);
  }
  for (std::size_t j = 0; j < vectors_.cols(); ++j) {
    for (const auto& a : vectors_.column(j)) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw std::invalid_argument("MeasurementEnsemble: non-finite sampling vector");
      }
      frobenius_squared_ += std::norm(a);
    }
  }
}

}  // namespace cdpr
