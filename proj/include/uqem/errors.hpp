#pragma once

#include <stdexcept>
#include <string>

namespace uqem {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input to a constructor or operation (dimension mismatch,
/// non-Hermitian matrix, probabilities that do not sum to one, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Device or experiment configuration rejected while parsing.
class ConfigError : public Error {
  public:
    ConfigError(std::string field_path, const std::string& what)
        : Error(field_path.empty() ? what : field_path + ": " + what), field_path_(std::move(field_path)) {}

    const std::string& field_path() const { return field_path_; }

  private:
    std::string field_path_;
};

/// Numerical failure: singular tomography data, infeasible decompositions,
/// negative probabilities during shot simulation.
class NumericalError : public Error {
  public:
    using Error::Error;
};

class InversionError : public NumericalError {
  public:
    InversionError(const std::string& what, double condition_number)
        : NumericalError(what), condition_number_(condition_number) {}

    double condition_number() const { return condition_number_; }

  private:
    double condition_number_;
};

class InfeasibleError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

}  // namespace uqem
