#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relaylab::adversary {

/// One row of a capture or replay log: t, event, detail.
struct LogEvent {
  double t = 0.0;
  std::string event;  // frame_sent, frame_recv, underrun_start, underrun_end, phase_change, ...
  std::string detail;
};

using EventLog = std::vector<LogEvent>;

void write_event_csv(std::ostream& os, const EventLog& log);

}  // namespace relaylab::adversary
