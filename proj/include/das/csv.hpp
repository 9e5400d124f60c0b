#pragma once

// CSV emission. Every file starts with a `# das-sim <kind> v1` schema line;
// reals are written with 9 significant digits and NaN as `nan`.

#include <iosfwd>
#include <string>
#include <vector>

#include "das/simulation.hpp"

namespace das::csv {

inline constexpr int kSchemaVersion = 1;

std::string format_real(double x);

// One row per (run, t), sorted by run then t.
void write_records(std::ostream& out, const ScenarioResult& result);
// Per-round means across runs.
void write_summary(std::ostream& out, const ScenarioResult& result);
// Stop-round statistics next to the closed-form round bounds.
void write_stop_rounds(std::ostream& out, const ScenarioResult& result);
void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace das::csv
