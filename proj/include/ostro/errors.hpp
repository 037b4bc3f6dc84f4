#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ostro {

/// Failure categories raised by the library. Everything except
/// `convergence_failure` is a domain error: the inputs describe a
/// configuration the analysis does not cover.
enum class errc {
  invalid_params,
  resonant_wavenumber,
  amplitude_out_of_range,
  division_by_zero,
  singularity,
  no_collision,
  not_a_collision,
  not_unstable,
  wrong_dispersion_sign,
  order_not_analyzed,
  xi_out_of_range,
  indefinite_near_zero,
  convergence_failure,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_params: return "InvalidParams";
    case errc::resonant_wavenumber: return "ResonantWavenumber";
    case errc::amplitude_out_of_range: return "AmplitudeOutOfRange";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::singularity: return "Singularity";
    case errc::no_collision: return "NoCollision";
    case errc::not_a_collision: return "NotACollision";
    case errc::not_unstable: return "NotUnstable";
    case errc::wrong_dispersion_sign: return "WrongDispersionSign";
    case errc::order_not_analyzed: return "OrderNotAnalyzed";
    case errc::xi_out_of_range: return "XiOutOfRange";
    case errc::indefinite_near_zero: return "IndefiniteNearZero";
    case errc::convergence_failure: return "ConvergenceFailure";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }
  bool is_domain() const noexcept { return code_ != errc::convergence_failure; }

 private:
  errc code_;
};

}  // namespace ostro
