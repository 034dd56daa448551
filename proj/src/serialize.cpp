#include "ecgd/serialize.hpp"

#include <charconv>
#include <json.hpp>

namespace ecgd {
namespace {

using nlohmann::json;

json grid_json(const GridGeometry& grid) {
  return {{"width_pixels", grid.width_pixels},
          {"height_pixels", grid.height_pixels},
          {"square_assumed", grid.square_assumed},
          {"large_from_bimodal", grid.large_from_bimodal}};
}

json lines_json(const std::vector<DetectedLine>& lines) {
  json out = json::array();
  for (const DetectedLine& l : lines) out.push_back({{"position", l.position}, {"score", l.score}});
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string signal_to_json(const DigitalSignal& sig) {
  json j = {{"fs", sig.sampling_rate}, {"mv", sig.mv}};
  return j.dump();
}

DigitalSignal signal_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::decode, std::string("signal JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("fs") || !j.contains("mv") || !j["fs"].is_number() || !j["mv"].is_array()) {
    throw Error(Errc::decode, "signal JSON must be {\"fs\": number, \"mv\": [numbers]}");
  }
  DigitalSignal sig;
  sig.sampling_rate = j["fs"].get<double>();
  for (const json& v : j["mv"]) {
    if (!v.is_number()) throw Error(Errc::decode, "signal JSON: non-numeric sample");
    sig.mv.push_back(v.get<double>());
  }
  validate(sig);
  return sig;
}

std::string grid_to_json(const GridGeometry& grid, const LineSet* lines) {
  json j = grid_json(grid);
  if (lines != nullptr) {
    j["verticals"] = lines_json(lines->verticals);
    j["horizontals"] = lines_json(lines->horizontals);
  }
  return j.dump(2);
}

std::string diagnostics_to_json(const Diagnostics& diag) {
  json j;
  j["grid"] = grid_json(diag.grid);
  j["grid_source"] = diag.grid_source;
  if (diag.hedging) {
    const HedgingTrace& h = *diag.hedging;
    j["hedging"] = {{"otsu_threshold", h.otsu_threshold},
                    {"otsu_degenerate", h.otsu_degenerate},
                    {"factors", h.factors},
                    {"final_factor", h.final_factor},
                    {"stop_reason", std::string(to_string(h.stop_reason))}};
  } else {
    j["hedging"] = nullptr;
  }
  json ys = json::array();
  for (const auto& y : diag.trace.y) ys.push_back(y ? json(*y) : json(nullptr));
  json gaps = json::array();
  for (const ColumnInterval& g : diag.trace.gaps_filled) gaps.push_back({g.begin, g.end});
  j["trace"] = {{"first_column", diag.trace.first_column}, {"y", ys}, {"gaps_filled", gaps}};
  return j.dump();
}

std::string config_to_json(const PipelineConfig& cfg) {
  json j = {{"mode", cfg.mode == InputMode::raw_image ? "raw" : "mask"},
            {"rate", cfg.rate},
            {"hedge_floor", cfg.hedge_floor},
            {"hedge_step", cfg.hedge_step},
            {"alpha", cfg.alpha},
            {"angle_scale", cfg.angle_scale},
            {"lag_window", cfg.lag_window},
            {"denoise", cfg.denoise},
            {"grid_fallback", cfg.grid_fallback == GridFallback::error ? "error" : "assume-square-default"},
            {"grid_px", cfg.grid_px ? json(*cfg.grid_px) : json(nullptr)},
            {"mv_per_large_square", cfg.scale.mv_per_large_square},
            {"sec_per_large_square", cfg.scale.sec_per_large_square}};
  return j.dump();
}

}  // namespace ecgd
