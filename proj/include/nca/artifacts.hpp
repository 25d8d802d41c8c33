#pragma once

#include <string>

#include "nca/align.hpp"
#include "nca/sim.hpp"
#include "nca/transfer.hpp"

// File artifacts written by the CLI. All of them embed the tool version and
// the seed they were produced with; re-running with identical inputs, flags
// and seed reproduces them byte for byte.

namespace nca::io {

inline constexpr const char* kVersion = "0.1.0";

std::string design_to_json(const align::CodeDesign& d);
align::CodeDesign design_from_json(const std::string& text);

std::string simulation_to_json(const sim::SimulationReport& r);
sim::SimulationReport simulation_from_json(const std::string& text);

std::string analysis_to_json(const transfer::AnalysisReport& r);

/// Write via a temp file in the same directory, then rename into place.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Human-readable, diff-friendly summaries printed by the CLI.
std::string render_analysis(const transfer::AnalysisReport& r);
std::string render_design(const align::CodeDesign& d,
                          const align::ConditionReport& check);
std::string render_simulation(const sim::SimulationReport& r);

}  // namespace nca::io
