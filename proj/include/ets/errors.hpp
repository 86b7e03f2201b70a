#ifndef ETS_ERRORS_HPP
#define ETS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ets {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model evaluation failures.
struct NonpositiveConsumption : Error {
  using Error::Error;
};
struct NonpositiveDamageDenominator : Error {
  using Error::Error;
};
struct NegativeCapital : Error {
  using Error::Error;
};

// Solver failures.
struct Infeasible : Error {
  using Error::Error;
};
struct RegionalInfeasibility : Error {
  RegionalInfeasibility(const std::string& region, int year, const std::string& what)
      : Error("region " + region + ", year " + std::to_string(year) + ": " + what),
        region(region),
        year(year) {}
  std::string region;
  int year = -1;
};

// Calibration failures.
struct DegenerateData : Error {
  using Error::Error;
};
struct ZeroGdp : Error {
  using Error::Error;
};
struct NoInteriorPoints : Error {
  using Error::Error;
};

// Diagnostics failures.
struct MissingMultipliers : Error {
  using Error::Error;
};
struct Unbracketed : Error {
  using Error::Error;
};
struct TemperatureMismatch : Error {
  using Error::Error;
};
struct GridMismatch : Error {
  using Error::Error;
};

// IO failures.
struct SchemaError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ets

#endif
