#pragma once

#include <string>
#include <string_view>

#include "ecgd/binarize.hpp"
#include "ecgd/calibrate.hpp"
#include "ecgd/pipeline.hpp"
#include "ecgd/trace.hpp"

namespace ecgd {

/// {"fs": <Hz>, "mv": [...]}
std::string signal_to_json(const DigitalSignal& sig);
DigitalSignal signal_from_json(std::string_view text);

std::string grid_to_json(const GridGeometry& grid, const LineSet* lines = nullptr);
std::string diagnostics_to_json(const Diagnostics& diag);
std::string config_to_json(const PipelineConfig& cfg);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace ecgd
