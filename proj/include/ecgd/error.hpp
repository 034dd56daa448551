#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecgd {

enum class Errc {
  invalid_argument,
  decode,
  unsupported_format,
  io,
  empty_grid,
  grid_undetected,
  empty_trace,
  calibration,
  rate_mismatch,
  short_overlap,
  length_mismatch,
  undefined_correlation,
  dimension_mismatch,
  empty_input,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library. `stage()` is filled in by the pipeline
// when an error crosses a stage boundary.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(Errc code, const std::string& message, std::string stage)
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  Errc code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  Errc code_;
  std::string stage_;
};

}  // namespace ecgd
