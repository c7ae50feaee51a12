#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace evint {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// An ordered collection of i.i.d. observation rows, each a response value and
/// a covariate vector of fixed dimension. Rows are the unit of resampling.
class Dataset
{
public:
  Dataset() = default;

  /// @throws DimensionMismatch if `x` and `y` disagree on the row count or
  ///   `names` does not match the covariate count.
  /// @throws TooFewObservations if there are no rows.
  Dataset(Eigen::VectorXd y,
          RowMatrix x,
          std::vector<std::string> covariate_names = {},
          std::string response_name = "y");

  std::size_t size() const noexcept { return static_cast<std::size_t>(y_.size()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(x_.cols()); }

  const Eigen::VectorXd& response() const noexcept { return y_; }
  const RowMatrix& covariates() const noexcept { return x_; }
  double response(std::size_t row) const { return y_(static_cast<Eigen::Index>(row)); }
  std::span<const double> covariates(std::size_t row) const;

  const std::vector<std::string>& covariate_names() const noexcept { return names_; }
  const std::string& response_name() const noexcept { return response_name_; }

  /// Index of the covariate called `name`; throws ConfigError when absent.
  std::size_t covariate_index(const std::string& name) const;

  /// New dataset made of the given rows, in order (repeats allowed).
  Dataset select_rows(std::span<const std::size_t> rows) const;

  /// Same covariates, different response vector.
  Dataset with_response(Eigen::VectorXd y) const;

private:
  Eigen::VectorXd y_;
  RowMatrix x_;
  std::vector<std::string> names_;
  std::string response_name_ = "y";
};

/// Reads a header-first CSV. The column named `response` becomes the response;
/// every other column is a covariate, in header order. Empty or non-numeric
/// cells are rejected.
Dataset read_csv(std::istream& in, const std::string& response);
Dataset read_csv(const std::filesystem::path& path, const std::string& response);

void write_csv(std::ostream& out, const Dataset& data);

} // namespace evint
