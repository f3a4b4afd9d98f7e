#pragma once

#include <stdexcept>
#include <string>

namespace mblrevive {

/// Base class of every error raised by the library. Subclasses name the
/// failure category so callers can react without parsing messages.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidSizeError : public Error {
  public:
    using Error::Error;
};

class ValidationError : public Error {
  public:
    using Error::Error;
};

class LengthMismatchError : public Error {
  public:
    using Error::Error;
};

/// A dense problem exceeds a configured size limit.
class ResourceError : public Error {
  public:
    using Error::Error;
};

class DegeneracyError : public Error {
  public:
    using Error::Error;
};

/// Raised when a site's Bloch vector is too short to define a direction.
class AmbiguousDirectionError : public Error {
  public:
    AmbiguousDirectionError(std::size_t site, double norm)
        : Error("ambiguous local direction at site " + std::to_string(site) + " (|r| = " + std::to_string(norm) + ")"),
          site_(site) {}
    [[nodiscard]] std::size_t site() const noexcept { return site_; }

  private:
    std::size_t site_;
};

class GlueMismatchError : public Error {
  public:
    GlueMismatchError(const std::string &what, double cut_weight) : Error(what), cut_weight_(cut_weight) {}
    [[nodiscard]] double cut_weight() const noexcept { return cut_weight_; }

  private:
    double cut_weight_;
};

class DegenerateNormError : public Error {
  public:
    using Error::Error;
};

class EmptyAggregateError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace mblrevive
