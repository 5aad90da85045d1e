#pragma once

#include <filesystem>
#include <iosfwd>

#include "relaylab/lab/runner.hpp"

namespace relaylab::lab {

/// Writes every artifact of a run into `dir` (created if needed) and a
/// manifest.json listing each file with its size and CRC-32. Only the
/// manifest's "created" field depends on the wall clock; pass
/// stamp_time = false to omit it.
void write_run_directory(const RunResult& result, const std::filesystem::path& dir, bool stamp_time = true);

void write_report_json(std::ostream& os, const RunReport& report);

/// Rows are frequency bins, columns are monitor snapshots (dB).
void write_spectrogram(std::ostream& matrix, std::ostream& sidecar, const RunResult& result);

}  // namespace relaylab::lab
