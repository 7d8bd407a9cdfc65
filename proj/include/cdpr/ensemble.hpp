#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cdpr/types.hpp"

namespace cdpr {

/// Dense M x N complex matrix whose rows are the sampling vectors a_m.
/// Stored column-major so that one coordinate touches a contiguous column.
class SamplingMatrix {
 public:
  SamplingMatrix() = default;
  SamplingMatrix(std::size_t rows, std::size_t cols);
  static SamplingMatrix from_rows(const std::vector<ComplexVec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  // [a_m]_j
  cplx& at(std::size_t m, std::size_t j) { return data_[j * rows_ + m]; }
  const cplx& at(std::size_t m, std::size_t j) const { return data_[j * rows_ + m]; }

  std::span<const cplx> column(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }
  ComplexVec row(std::size_t m) const;

  /// z_m = a_m^H x for all m.
  ComplexVec apply(std::span<const cplx> x) const;
  /// sum_m v_m a_m.
  ComplexVec apply_adjoint(std::span<const cplx> v) const;

  bool operator==(const SamplingMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// A phase-retrieval instance: sampling vectors plus measured intensities.
/// Immutable after construction.
class MeasurementEnsemble {
 public:
  /// Throws std::invalid_argument when M or N is zero, sizes disagree, or
  /// any entry is non-finite.
  MeasurementEnsemble(SamplingMatrix vectors, RealVec intensities);

  std::size_t signal_length() const { return vectors_.cols(); }
  std::size_t measurement_count() const { return vectors_.rows(); }

  const SamplingMatrix& vectors() const { return vectors_; }
  std::span<const double> intensities() const { return intensities_; }

  double intensity_energy() const { return intensity_energy_; }  // ||b||^2
  double intensity_l1() const { return intensity_l1_; }          // ||b||_1
  double frobenius_squared() const { return frobenius_squared_; }  // sum_m ||a_m||^2

 private:
  SamplingMatrix vectors_;
  RealVec intensities_;
  double intensity_energy_ = 0.0;
  double intensity_l1_ = 0.0;
  double frobenius_squared_ = 0.0;
};

}  // namespace cdpr
