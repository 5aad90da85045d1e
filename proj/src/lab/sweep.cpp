#include "relaylab/lab/sweep.hpp"

#include <yaml-cpp/yaml.h>

#include <ostream>

#include <fmt/format.h>

namespace relaylab::lab {
namespace {

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto dot = path.find('.', start);
    const auto end = dot == std::string_view::npos ? path.size() : dot;
    parts.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

[[noreturn]] void unresolved(std::string_view path, std::string_view why) {
  throw ScenarioError(fmt::format("parameter '{}': {}", path, why));
}

// Walks the tree and returns the addressed scalar node (a reference into root).
YAML::Node locate(YAML::Node root, std::string_view path) {
  if (path.empty()) unresolved(path, "empty path");
  YAML::Node node = root;
  for (const auto& part : split_path(path)) {
    if (part.empty()) unresolved(path, "empty path component");
    if (node.IsMap()) {
      if (!node[part]) unresolved(path, fmt::format("no entry '{}'", part));
      node.reset(node[part]);
    } else if (node.IsSequence()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(part, &used);
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        unresolved(path, fmt::format("'{}' is not a list index", part));
      }
      if (idx >= node.size()) unresolved(path, fmt::format("index {} out of range", idx));
      node.reset(node[idx]);
    } else {
      unresolved(path, fmt::format("'{}' is below a scalar", part));
    }
  }
  return node;
}

}  // namespace

void check_parameter_path(const Scenario& base, std::string_view path) {
  const auto node = locate(YAML::Load(serialize_scenario(base)), path);
  if (!node.IsScalar()) unresolved(path, "not a scalar entry");
}

Scenario with_parameter(const Scenario& base, std::string_view path, std::string_view value) {
  auto root = YAML::Load(serialize_scenario(base));
  auto node = locate(root, path);
  if (!node.IsScalar()) unresolved(path, "not a scalar entry");
  node = std::string(value);
  YAML::Emitter out;
  out << root;
  return parse_scenario_text(out.c_str(), fmt::format("{}={}", path, value));
}

std::vector<SweepRow> sweep(const Scenario& base, std::string_view path, const std::vector<std::string>& values,
                            const RunOptions& options,
                            const std::function<void(const SweepRow&, const RunResult&)>& on_run) {
  check_parameter_path(base, path);
  std::vector<Scenario> runs;
  runs.reserve(values.size());
  for (const auto& v : values) runs.push_back(with_parameter(base, path, v));

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    auto result = run_scenario(runs[i], options);
    rows.push_back({values[i], result.report});
    if (on_run) on_run(rows.back(), result);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, std::string_view path, const std::vector<SweepRow>& rows) {
  auto field = [](const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : std::string(); };
  os << fmt::format(
      "{},captured,time_to_first_fix,time_to_capture,final_error_vs_victim,final_error_vs_sampler,"
      "stall_seconds,alarms\n",
      path);
  for (const auto& r : rows) {
    const auto& p = r.report;
    os << fmt::format("{},{},{},{},{},{},{:.3f},{}\n", r.value, int(p.captured()), field(p.time_to_first_fix),
                      field(p.time_to_capture), field(p.final_position_error_vs_victim_truth),
                      field(p.final_position_error_vs_sampler_truth), p.stall_seconds, p.alarms.size());
  }
}

}  // namespace relaylab::lab
