#include "ecgd/error.hpp"

namespace ecgd {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::decode: return "decode";
    case Errc::unsupported_format: return "unsupported-format";
    case Errc::io: return "io";
    case Errc::empty_grid: return "empty-grid";
    case Errc::grid_undetected: return "grid-undetected";
    case Errc::empty_trace: return "empty-trace";
    case Errc::calibration: return "calibration";
    case Errc::rate_mismatch: return "rate-mismatch";
    case Errc::short_overlap: return "short-overlap";
    case Errc::length_mismatch: return "length-mismatch";
    case Errc::undefined_correlation: return "undefined-correlation";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::empty_input: return "empty-input";
  }
  return "unknown";
}

}  // namespace ecgd
