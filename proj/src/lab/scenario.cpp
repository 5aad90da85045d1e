#include "relaylab/lab/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "relaylab/scene/render.hpp"

namespace relaylab::lab {

std::string_view to_string(RunMode m) { return m == RunMode::Virtual ? "virtual" : "live"; }

std::string_view to_string(AssistSource a) {
  switch (a) {
    case AssistSource::None: return "none";
    case AssistSource::Victim: return "victim";
    case AssistSource::Sampler: return "sampler";
  }
  return "?";
}

adversary::SamplerNode Scenario::sampler_node() const {
  adversary::SamplerNode node;
  node.cfg = stream;
  node.location = scene.sampler_location;
  node.full_scale = sampler_full_scale;
  node.clock_skew = sampler_clock_skew;
  node.band = Band::L1;
  return node;
}

adversary::ForwarderNode Scenario::forwarder_node() const {
  adversary::ForwarderNode node;
  node.jitter_buffer_target = jitter_buffer;
  node.replay_gain = replay_gain;
  node.full_scale = sampler_full_scale;
  node.jammer.bands = jam_bands;
  node.jammer.noise_power = jam_power * scene.noise_floor;
  for (const Band b : jam_bands) {
    for (const auto& iv : adversary::jam_intervals(script, b)) node.jammer.enabled_intervals.push_back(iv);
  }
  return node;
}

receiver::ReceiverAssist Scenario::receiver_assist() const {
  receiver::ReceiverAssist a;
  if (assist == AssistSource::Victim) a.position = scene.victim_location;
  if (assist == AssistSource::Sampler) a.position = scene.sampler_location;
  return a;
}

namespace {

[[noreturn]] void section_error(std::string_view section, const std::string& what) {
  throw DomainError(fmt::format("{}: {}", section, what));
}

template <typename F>
void check_section(std::string_view section, F&& check) {
  try {
    check();
  } catch (const DomainError& e) {
    section_error(section, e.what());
  }
}

}  // namespace

void Scenario::validate() const {
  if (!std::isfinite(horizon) || horizon <= 0.0) section_error("horizon", "must be positive");
  if (!(capture_radius > 0.0)) section_error("capture_radius", "must be positive");
  check_section("scene", [&] { scene.validate(); });
  check_section("stream", [&] { stream.validate(); });
  if (!(sampler_full_scale > 0.0)) section_error("sampler", "full_scale must be positive");
  if (!(std::abs(sampler_clock_skew) < 1e-3)) section_error("sampler", "clock_skew must be below 1e-3");
  check_section("link", [&] { link.validate(); });
  check_section("script", [&] { script.validate(); });
  if (script.end_time() > horizon) {
    section_error("horizon", fmt::format("{} s does not cover the script ending at {} s", horizon, script.end_time()));
  }
  check_section("forwarder", [&] { forwarder_node().validate(); });
  for (const Band b : {Band::L1, Band::L2}) {
    const bool needed = !adversary::jam_intervals(script, b).empty();
    if (needed && std::find(jam_bands.begin(), jam_bands.end(), b) == jam_bands.end()) {
      section_error("jammer", fmt::format("the script jams {} but the jammer does not cover it", to_string(b)));
    }
  }
  check_section("receiver", [&] { receiver.validate(); });
  std::set<Band> bands(receiver.bands.begin(), receiver.bands.end());
  if (bands.size() != receiver.bands.size()) section_error("receiver", "duplicate band");
  if (receiver.power_on_time >= horizon) section_error("receiver", "power_on must precede the horizon");

  const auto visible_victim = scene::visible_satellites(scene, scene.victim_location, Band::L1).size();
  if (visible_victim < 4) {
    section_error("scene", fmt::format("{} satellites visible from the victim; a position fix needs at least 4",
                                       visible_victim));
  }
  if (!adversary::replay_intervals(script).empty()) {
    const auto visible_sampler = scene::visible_satellites(scene, scene.sampler_location, Band::L1).size();
    if (visible_sampler < 4) {
      section_error("scene", fmt::format("{} satellites visible from the sampler; a replayed fix needs at least 4",
                                         visible_sampler));
    }
  }

  if (monitor.enabled) {
    const double ratio = monitor.sample_rate / stream.sample_rate;
    if (!(ratio >= 2.0) || ratio != std::floor(ratio)) {
      section_error("monitor", "sample_rate must be an integer multiple (at least 2) of the stream rate");
    }
    if (monitor.nfft < 16) section_error("monitor", "nfft must be at least 16");
    if (!(monitor.snapshot_s * monitor.sample_rate >= monitor.nfft)) {
      section_error("monitor", "snapshot shorter than one transform");
    }
    if (!(monitor.period_s >= monitor.snapshot_s)) section_error("monitor", "period shorter than the snapshot");
    if (!(monitor.baseline_end >= monitor.snapshot_s) || monitor.baseline_end > horizon) {
      section_error("monitor", "baseline_end must leave one snapshot and lie within the horizon");
    }
    auto attack_start = std::numeric_limits<double>::infinity();
    for (const Band b : {Band::L1, Band::L2}) {
      for (const auto& iv : adversary::jam_intervals(script, b)) attack_start = std::min(attack_start, iv.start);
    }
    for (const auto& [start, end] : adversary::replay_intervals(script)) attack_start = std::min(attack_start, start);
    if (attack_start < monitor.baseline_end) {
      section_error("monitor", "the baseline interval must be free of jamming and replay");
    }
  }
}

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

class Reader {
 public:
  explicit Reader(std::string_view origin) : origin_(origin) {}

  [[noreturn]] void fail(const YAML::Node& at, std::string_view msg) const {
    const auto mark = at.Mark();
    if (mark.is_null()) throw ScenarioError(fmt::format("{}: {}", origin_, msg));
    throw ScenarioError(fmt::format("{}:{}: {}", origin_, mark.line + 1, msg));
  }

  void keys(const YAML::Node& map, std::string_view section, std::initializer_list<std::string_view> allowed) const {
    if (!map.IsMap()) fail(map, fmt::format("{} must be a mapping", section));
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(kv.first, fmt::format("unknown key '{}' in {}", key, section));
      }
    }
  }

  YAML::Node section(const YAML::Node& map, const char* key) const {
    const auto node = map[key];
    if (!node) fail(map, fmt::format("missing section '{}'", key));
    return node;
  }

  template <typename T>
  T as(const YAML::Node& node, std::string_view what) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, fmt::format("{}: cannot read '{}'", what, node.IsScalar() ? node.Scalar() : std::string("<tree>")));
    }
  }

  template <typename T>
  void opt(const YAML::Node& map, const char* key, T& out) const {
    const auto node = map[key];
    if (node) out = as<T>(node, key);
  }

  template <typename T>
  T req(const YAML::Node& map, const char* key) const {
    const auto node = map[key];
    if (!node) fail(map, fmt::format("missing key '{}'", key));
    return as<T>(node, key);
  }

  Band band(const YAML::Node& node) const {
    const auto s = as<std::string>(node, "band");
    if (s == "L1") return Band::L1;
    if (s == "L2") return Band::L2;
    fail(node, fmt::format("unknown band '{}'", s));
  }

  std::vector<Band> bands(const YAML::Node& node) const {
    if (!node.IsSequence()) fail(node, "bands must be a list");
    std::vector<Band> out;
    for (const auto& b : node) out.push_back(band(b));
    return out;
  }

  scene::EcefPosition vec3(const YAML::Node& node, std::string_view what) const {
    if (!node.IsSequence() || node.size() != 3) fail(node, fmt::format("{} must be [x, y, z]", what));
    return {as<double>(node[0], what), as<double>(node[1], what), as<double>(node[2], what)};
  }

  scene::EcefPosition site(const YAML::Node& node, std::string_view what) const {
    keys(node, what, {"ecef", "lat", "lon", "height"});
    if (node["ecef"]) {
      if (node["lat"] || node["lon"] || node["height"]) fail(node, fmt::format("{}: give ecef or lat/lon, not both", what));
      return vec3(node["ecef"], what);
    }
    scene::Geodetic g;
    g.lat_rad = req<double>(node, "lat") * kDeg;
    g.lon_rad = req<double>(node, "lon") * kDeg;
    opt(node, "height", g.height_m);
    return scene::geodetic_to_ecef(g);
  }

 private:
  std::string origin_;
};

void read_scene(const Reader& r, const YAML::Node& node, scene::Scene& sc) {
  r.keys(node, "scene", {"nav_seed", "noise_floor", "noise_reference_rate", "sampler", "victim", "satellites"});
  r.opt(node, "nav_seed", sc.nav_seed);
  r.opt(node, "noise_floor", sc.noise_floor);
  r.opt(node, "noise_reference_rate", sc.noise_reference_rate);
  sc.sampler_location = r.site(r.section(node, "sampler"), "scene.sampler");
  sc.victim_location = r.site(r.section(node, "victim"), "scene.victim");
  const auto sats = r.section(node, "satellites");
  if (!sats.IsSequence()) r.fail(sats, "satellites must be a list");
  for (const auto& s : sats) {
    r.keys(s, "satellite", {"prn", "position", "orbit", "power_db", "l2"});
    scene::SatelliteOrbitSpec spec;
    spec.prn_id = r.req<int>(s, "prn");
    if (s["position"] && s["orbit"]) r.fail(s, "satellite: give position or orbit, not both");
    if (s["position"]) {
      spec.motion = r.vec3(s["position"], "position");
    } else if (s["orbit"]) {
      const auto o = s["orbit"];
      r.keys(o, "orbit", {"radius", "inclination", "raan", "phase", "angular_rate"});
      scene::CircularOrbit orbit;
      r.opt(o, "radius", orbit.radius);
      r.opt(o, "inclination", orbit.inclination);
      r.opt(o, "raan", orbit.raan);
      r.opt(o, "phase", orbit.phase);
      r.opt(o, "angular_rate", orbit.angular_rate);
      spec.motion = orbit;
    } else {
      r.fail(s, "satellite needs a position or an orbit");
    }
    r.opt(s, "power_db", spec.power_db);
    r.opt(s, "l2", spec.on_l2);
    sc.satellites.push_back(spec);
  }
}

void read_link(const Reader& r, const YAML::Node& node, wire::LinkModel& link) {
  r.keys(node, "link", {"bandwidth", "latency", "jitter", "mode", "loss_prob", "send_buffer", "congestion"});
  r.opt(node, "bandwidth", link.bandwidth);
  r.opt(node, "latency", link.base_latency);
  r.opt(node, "jitter", link.jitter_stddev);
  r.opt(node, "loss_prob", link.loss_prob);
  r.opt(node, "send_buffer", link.send_buffer_limit);
  if (node["mode"]) {
    const auto m = r.as<std::string>(node["mode"], "mode");
    if (m == "reliable") {
      link.mode = wire::LinkMode::ReliableStream;
    } else if (m == "lossy") {
      link.mode = wire::LinkMode::LossyDatagram;
    } else {
      r.fail(node["mode"], fmt::format("unknown link mode '{}'", m));
    }
  }
  if (const auto eps = node["congestion"]) {
    if (!eps.IsSequence()) r.fail(eps, "congestion must be a list");
    for (const auto& e : eps) {
      r.keys(e, "congestion episode", {"start", "duration", "factor"});
      try {
        link = wire::apply_congestion_episode(link, r.req<double>(e, "start"), r.req<double>(e, "duration"),
                                              r.req<double>(e, "factor"));
      } catch (const DomainError& err) {
        r.fail(e, err.what());
      }
    }
  }
}

void read_script(const Reader& r, const YAML::Node& node, adversary::AttackScript& script) {
  if (!node.IsSequence()) r.fail(node, "script must be a list of phases");
  for (const auto& p : node) {
    r.keys(p, "phase", {"phase", "start", "duration"});
    adversary::AttackPhase phase;
    const auto kind = r.req<std::string>(p, "phase");
    const auto parsed = adversary::phase_from_string(kind);
    if (!parsed) r.fail(p["phase"], fmt::format("unknown phase '{}'", kind));
    phase.kind = *parsed;
    phase.start = r.req<double>(p, "start");
    phase.duration = r.req<double>(p, "duration");
    script.phases.push_back(phase);
  }
}

void read_receiver(const Reader& r, const YAML::Node& node, Scenario& s) {
  r.keys(node, "receiver",
         {"power_on", "clock_offset", "bands", "search_prns", "assist", "acquisition_threshold", "doppler_span",
          "doppler_bin", "coherent_ms", "noncoherent_sums", "cn0_floor", "loss_timeout", "reacquisition_period",
          "verify_time", "pvt_interval", "time_search_window", "dll_gain", "fll_gain", "pull_in_dll_gain",
          "pull_in_fll_gain", "pull_in"});
  auto& c = s.receiver;
  r.opt(node, "power_on", c.power_on_time);
  r.opt(node, "clock_offset", c.clock_offset_s);
  if (node["bands"]) c.bands = r.bands(node["bands"]);
  r.opt(node, "search_prns", c.search_prns);
  r.opt(node, "acquisition_threshold", c.acquisition_threshold);
  r.opt(node, "doppler_span", c.doppler_span_hz);
  r.opt(node, "doppler_bin", c.doppler_bin_hz);
  r.opt(node, "coherent_ms", c.coherent_ms);
  r.opt(node, "noncoherent_sums", c.noncoherent_sums);
  r.opt(node, "cn0_floor", c.cn0_floor_dbhz);
  r.opt(node, "loss_timeout", c.loss_timeout_s);
  r.opt(node, "reacquisition_period", c.reacquisition_period_s);
  r.opt(node, "verify_time", c.verify_time_s);
  r.opt(node, "pvt_interval", c.pvt_interval_s);
  r.opt(node, "time_search_window", c.time_search_window_s);
  r.opt(node, "dll_gain", c.dll_gain);
  r.opt(node, "fll_gain", c.fll_gain);
  r.opt(node, "pull_in_dll_gain", c.pull_in_dll_gain);
  r.opt(node, "pull_in_fll_gain", c.fll_pull_in_gain);
  r.opt(node, "pull_in", c.pull_in_s);
  if (node["assist"]) {
    const auto a = r.as<std::string>(node["assist"], "assist");
    if (a == "none") {
      s.assist = AssistSource::None;
    } else if (a == "victim") {
      s.assist = AssistSource::Victim;
    } else if (a == "sampler") {
      s.assist = AssistSource::Sampler;
    } else {
      r.fail(node["assist"], fmt::format("unknown assist source '{}'", a));
    }
  }
}

void read_monitor(const Reader& r, const YAML::Node& node, MonitorConfig& m) {
  r.keys(node, "monitor", {"enabled", "sample_rate", "snapshot", "period", "nfft", "baseline_end"});
  r.opt(node, "enabled", m.enabled);
  r.opt(node, "sample_rate", m.sample_rate);
  r.opt(node, "snapshot", m.snapshot_s);
  r.opt(node, "period", m.period_s);
  r.opt(node, "nfft", m.nfft);
  r.opt(node, "baseline_end", m.baseline_end);
}

}  // namespace

Scenario parse_scenario_text(std::string_view text, std::string_view origin) {
  const Reader r(origin);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(fmt::format("{}:{}: {}", origin, e.mark.line + 1, e.msg));
  }
  if (!root.IsMap()) throw ScenarioError(fmt::format("{}: scenario must be a mapping", origin));
  r.keys(root, "scenario",
         {"name", "seed", "horizon", "mode", "capture_radius", "scene", "stream", "sampler", "link", "forwarder",
          "jammer", "script", "receiver", "monitor"});

  Scenario s;
  r.opt(root, "name", s.name);
  r.opt(root, "seed", s.seed);
  s.horizon = r.req<double>(root, "horizon");
  r.opt(root, "capture_radius", s.capture_radius);
  if (root["mode"]) {
    const auto m = r.as<std::string>(root["mode"], "mode");
    if (m == "virtual") {
      s.mode = RunMode::Virtual;
    } else if (m == "live") {
      s.mode = RunMode::Live;
    } else {
      r.fail(root["mode"], fmt::format("unknown mode '{}'", m));
    }
  }

  read_scene(r, r.section(root, "scene"), s.scene);
  if (const auto n = root["stream"]) {
    r.keys(n, "stream", {"sample_rate", "bits", "frame_samples"});
    r.opt(n, "sample_rate", s.stream.sample_rate);
    r.opt(n, "bits", s.stream.quantization_bits);
    r.opt(n, "frame_samples", s.stream.frame_samples);
  }
  if (const auto n = root["sampler"]) {
    r.keys(n, "sampler", {"full_scale", "clock_skew"});
    r.opt(n, "full_scale", s.sampler_full_scale);
    r.opt(n, "clock_skew", s.sampler_clock_skew);
  }
  if (const auto n = root["link"]) read_link(r, n, s.link);
  if (const auto n = root["forwarder"]) {
    r.keys(n, "forwarder", {"jitter_buffer", "replay_gain"});
    r.opt(n, "jitter_buffer", s.jitter_buffer);
    r.opt(n, "replay_gain", s.replay_gain);
  }
  if (const auto n = root["jammer"]) {
    r.keys(n, "jammer", {"bands", "power"});
    if (n["bands"]) s.jam_bands = r.bands(n["bands"]);
    r.opt(n, "power", s.jam_power);
  }
  read_script(r, r.section(root, "script"), s.script);
  if (const auto n = root["receiver"]) read_receiver(r, n, s);
  if (const auto n = root["monitor"]) read_monitor(r, n, s.monitor);

  try {
    s.validate();
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    const auto key = msg.substr(0, colon);
    const auto at = root[key];
    r.fail(at ? at : root, msg);
  }
  return s;
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(fmt::format("{}: cannot open", path.string()));
  std::stringstream text;
  text << in.rdbuf();
  return parse_scenario_text(text.str(), path.string());
}

namespace {

// Shortest text that reads back to the same double.
std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  return fmt::format("{}", v);
}

void emit_vec3(YAML::Emitter& out, const scene::EcefPosition& p) {
  out << YAML::Flow << YAML::BeginSeq << num(p.x) << num(p.y) << num(p.z) << YAML::EndSeq;
}

void emit_bands(YAML::Emitter& out, const std::vector<Band>& bands) {
  out << YAML::Flow << YAML::BeginSeq;
  for (const Band b : bands) out << std::string(to_string(b));
  out << YAML::EndSeq;
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << s.name;
  out << YAML::Key << "seed" << YAML::Value << s.seed;
  out << YAML::Key << "horizon" << YAML::Value << num(s.horizon);
  out << YAML::Key << "mode" << YAML::Value << std::string(to_string(s.mode));
  out << YAML::Key << "capture_radius" << YAML::Value << num(s.capture_radius);

  out << YAML::Key << "scene" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "nav_seed" << YAML::Value << s.scene.nav_seed;
  out << YAML::Key << "noise_floor" << YAML::Value << num(s.scene.noise_floor);
  out << YAML::Key << "noise_reference_rate" << YAML::Value << num(s.scene.noise_reference_rate);
  out << YAML::Key << "sampler" << YAML::Value << YAML::BeginMap << YAML::Key << "ecef" << YAML::Value;
  emit_vec3(out, s.scene.sampler_location);
  out << YAML::EndMap;
  out << YAML::Key << "victim" << YAML::Value << YAML::BeginMap << YAML::Key << "ecef" << YAML::Value;
  emit_vec3(out, s.scene.victim_location);
  out << YAML::EndMap;
  out << YAML::Key << "satellites" << YAML::Value << YAML::BeginSeq;
  for (const auto& sat : s.scene.satellites) {
    out << YAML::BeginMap << YAML::Key << "prn" << YAML::Value << sat.prn_id;
    if (const auto* p = std::get_if<scene::EcefPosition>(&sat.motion)) {
      out << YAML::Key << "position" << YAML::Value;
      emit_vec3(out, *p);
    } else {
      const auto& o = std::get<scene::CircularOrbit>(sat.motion);
      out << YAML::Key << "orbit" << YAML::Value << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "radius" << YAML::Value << num(o.radius);
      out << YAML::Key << "inclination" << YAML::Value << num(o.inclination);
      out << YAML::Key << "raan" << YAML::Value << num(o.raan);
      out << YAML::Key << "phase" << YAML::Value << num(o.phase);
      out << YAML::Key << "angular_rate" << YAML::Value << num(o.angular_rate);
      out << YAML::EndMap;
    }
    out << YAML::Key << "power_db" << YAML::Value << num(sat.power_db);
    out << YAML::Key << "l2" << YAML::Value << sat.on_l2;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::Key << "stream" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "sample_rate" << YAML::Value << num(s.stream.sample_rate);
  out << YAML::Key << "bits" << YAML::Value << s.stream.quantization_bits;
  out << YAML::Key << "frame_samples" << YAML::Value << s.stream.frame_samples;
  out << YAML::EndMap;

  out << YAML::Key << "sampler" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "full_scale" << YAML::Value << num(s.sampler_full_scale);
  out << YAML::Key << "clock_skew" << YAML::Value << num(s.sampler_clock_skew);
  out << YAML::EndMap;

  out << YAML::Key << "link" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "bandwidth" << YAML::Value << num(s.link.bandwidth);
  out << YAML::Key << "latency" << YAML::Value << num(s.link.base_latency);
  out << YAML::Key << "jitter" << YAML::Value << num(s.link.jitter_stddev);
  out << YAML::Key << "mode" << YAML::Value
      << (s.link.mode == wire::LinkMode::ReliableStream ? "reliable" : "lossy");
  out << YAML::Key << "loss_prob" << YAML::Value << num(s.link.loss_prob);
  out << YAML::Key << "send_buffer" << YAML::Value << s.link.send_buffer_limit;
  out << YAML::Key << "congestion" << YAML::Value;
  if (s.link.congestion_episodes.empty()) out << YAML::Flow;
  out << YAML::BeginSeq;
  for (const auto& e : s.link.congestion_episodes) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "start" << YAML::Value << num(e.start);
    out << YAML::Key << "duration" << YAML::Value << num(e.duration);
    out << YAML::Key << "factor" << YAML::Value << num(e.bandwidth_factor);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;

  out << YAML::Key << "forwarder" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "jitter_buffer" << YAML::Value << num(s.jitter_buffer);
  out << YAML::Key << "replay_gain" << YAML::Value << num(s.replay_gain);
  out << YAML::EndMap;

  out << YAML::Key << "jammer" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "bands" << YAML::Value;
  emit_bands(out, s.jam_bands);
  out << YAML::Key << "power" << YAML::Value << num(s.jam_power);
  out << YAML::EndMap;

  out << YAML::Key << "script" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : s.script.phases) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "phase" << YAML::Value << std::string(to_string(p.kind));
    out << YAML::Key << "start" << YAML::Value << num(p.start);
    out << YAML::Key << "duration" << YAML::Value << num(p.duration);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const auto& c = s.receiver;
  out << YAML::Key << "receiver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "power_on" << YAML::Value << num(c.power_on_time);
  out << YAML::Key << "clock_offset" << YAML::Value << num(c.clock_offset_s);
  out << YAML::Key << "bands" << YAML::Value;
  emit_bands(out, c.bands);
  out << YAML::Key << "search_prns" << YAML::Value << YAML::Flow << c.search_prns;
  out << YAML::Key << "assist" << YAML::Value << std::string(to_string(s.assist));
  out << YAML::Key << "acquisition_threshold" << YAML::Value << num(c.acquisition_threshold);
  out << YAML::Key << "doppler_span" << YAML::Value << num(c.doppler_span_hz);
  out << YAML::Key << "doppler_bin" << YAML::Value << num(c.doppler_bin_hz);
  out << YAML::Key << "coherent_ms" << YAML::Value << c.coherent_ms;
  out << YAML::Key << "noncoherent_sums" << YAML::Value << c.noncoherent_sums;
  out << YAML::Key << "cn0_floor" << YAML::Value << num(c.cn0_floor_dbhz);
  out << YAML::Key << "loss_timeout" << YAML::Value << num(c.loss_timeout_s);
  out << YAML::Key << "reacquisition_period" << YAML::Value << num(c.reacquisition_period_s);
  out << YAML::Key << "verify_time" << YAML::Value << num(c.verify_time_s);
  out << YAML::Key << "pvt_interval" << YAML::Value << num(c.pvt_interval_s);
  out << YAML::Key << "time_search_window" << YAML::Value << num(c.time_search_window_s);
  out << YAML::Key << "dll_gain" << YAML::Value << num(c.dll_gain);
  out << YAML::Key << "fll_gain" << YAML::Value << num(c.fll_gain);
  out << YAML::Key << "pull_in_dll_gain" << YAML::Value << num(c.pull_in_dll_gain);
  out << YAML::Key << "pull_in_fll_gain" << YAML::Value << num(c.fll_pull_in_gain);
  out << YAML::Key << "pull_in" << YAML::Value << num(c.pull_in_s);
  out << YAML::EndMap;

  const auto& m = s.monitor;
  out << YAML::Key << "monitor" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << m.enabled;
  out << YAML::Key << "sample_rate" << YAML::Value << num(m.sample_rate);
  out << YAML::Key << "snapshot" << YAML::Value << num(m.snapshot_s);
  out << YAML::Key << "period" << YAML::Value << num(m.period_s);
  out << YAML::Key << "nfft" << YAML::Value << m.nfft;
  out << YAML::Key << "baseline_end" << YAML::Value << num(m.baseline_end);
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace relaylab::lab
