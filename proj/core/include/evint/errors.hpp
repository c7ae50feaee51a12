#pragma once

#include <stdexcept>
#include <string>

namespace evint {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or configuration. The CLI maps these to exit code 2.
class InputError : public Error
{
public:
  using Error::Error;
};

/// A statistical procedure could not produce a result. The CLI maps these to
/// exit code 3.
class StatisticalError : public Error
{
public:
  using Error::Error;
};

class ConfigError : public InputError
{
public:
  using InputError::InputError;
};

class CsvError : public InputError
{
public:
  using InputError::InputError;
};

class DimensionMismatch : public InputError
{
public:
  using InputError::InputError;
};

class QOutOfRange : public InputError
{
public:
  using InputError::InputError;
};

class InvalidInterval : public InputError
{
public:
  using InputError::InputError;
};

class TooFewObservations : public InputError
{
public:
  using InputError::InputError;
};

class RankDeficient : public StatisticalError
{
public:
  using StatisticalError::StatisticalError;
};

class DegenerateVariance : public StatisticalError
{
public:
  using StatisticalError::StatisticalError;
};

class NonFiniteLikelihood : public StatisticalError
{
public:
  using StatisticalError::StatisticalError;
};

class TooManyRejections : public StatisticalError
{
public:
  using StatisticalError::StatisticalError;
};

class InsufficientSample : public StatisticalError
{
public:
  using StatisticalError::StatisticalError;
};

class ZeroRecaptures : public StatisticalError
{
public:
  using StatisticalError::StatisticalError;
};

class OptimizerFailure : public StatisticalError
{
public:
  using StatisticalError::StatisticalError;
};

class EquidistantModels : public StatisticalError
{
public:
  using StatisticalError::StatisticalError;
};

/// Every value of a sample is the same; carries the common value so callers
/// can fall back to a point mass.
class DegenerateSample : public StatisticalError
{
public:
  explicit DegenerateSample(double location)
    : StatisticalError("sample has zero spread")
    , location_(location)
  {}

  double location() const noexcept { return location_; }

private:
  double location_;
};

} // namespace evint
