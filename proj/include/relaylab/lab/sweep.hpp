#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "relaylab/lab/runner.hpp"
#include "relaylab/lab/scenario.hpp"

namespace relaylab::lab {

struct SweepRow {
  std::string value;
  RunReport report;
};

/// Copy of `base` with the entry at `path` replaced by `value`. Paths are
/// dotted keys of the resolved scenario tree, list elements by index
/// ("link.bandwidth", "script.1.duration"). An unresolvable path or a value
/// that breaks validation raises ScenarioError.
Scenario with_parameter(const Scenario& base, std::string_view path, std::string_view value);

/// Throws ScenarioError unless `path` names an existing scalar entry.
void check_parameter_path(const Scenario& base, std::string_view path);

/// One run per value, all with the base scenario's seed (unless the swept
/// parameter is the seed itself). `on_run` sees every finished run.
std::vector<SweepRow> sweep(const Scenario& base, std::string_view path, const std::vector<std::string>& values,
                            const RunOptions& options = {},
                            const std::function<void(const SweepRow&, const RunResult&)>& on_run = {});

void write_sweep_csv(std::ostream& os, std::string_view path, const std::vector<SweepRow>& rows);

}  // namespace relaylab::lab
