#pragma once

// Deterministic SVG line charts of F1 agreement against budget fraction.

#include <filesystem>
#include <span>
#include <string>

#include "allocbench/eval.hpp"

namespace allocbench {

/// One line per setting (f1_mean vs budget_fraction) with a shaded +-1 sd
/// ribbon, plus a dashed horizontal line at that setting's UC mean when the
/// rows contain one. `scenario` must be TOPK or CE. The same rows always give
/// the same bytes.
std::string render_f1_plot(std::span<const AggregateRow> rows, Scenario scenario);

/// Reads an aggregate CSV and writes the SVG atomically. Nothing is written on
/// error.
void emit_plot(const std::filesystem::path& aggregate_csv, Scenario scenario, const std::filesystem::path& svg_path);

}  // namespace allocbench
