// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mcsloc {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (non-positive distance, empty frame, ...).
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// Invalid configuration (scenario file, MCS CSV, CLI arguments).
class ConfigError : public Error
{
  public:
    using Error::Error;
};

/// Bob's downlink SNR is below the lowest MCS entry.
class OutOfCoverage : public Error
{
  public:
    using Error::Error;
};

/// Mean received power does not exceed the noise floor.
class SignalBelowNoise : public Error
{
  public:
    using Error::Error;
};

/// A ring is empty after clamping to the cell.
class EmptyRegion : public Error
{
  public:
    using Error::Error;
};

/// Every measurement of a sweep came back undetectable.
class SweepFailed : public Error
{
  public:
    using Error::Error;
};

/// Subspace DoA estimation could not split signal and noise.
class EstimationFailed : public Error
{
  public:
    using Error::Error;
};

class IoError : public Error
{
  public:
    using Error::Error;
};

} // namespace mcsloc
