#include "aegis/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "aegis/fs_util.hpp"
#include "aegis/liveness.hpp"
#include "aegis/pgm.hpp"
#include "aegis/prng.hpp"

namespace aegis::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kFrameWidth = 128;
constexpr int kFrameHeight = 96;
constexpr int kFaceX = 48;
constexpr int kFaceY = 32;
constexpr int kFaceSize = 32;

constexpr const char* kVulnerabilityNote = "reproduced vulnerability";
constexpr const char* kFailureModeNote = "known failure mode (reproduced)";

SceneSpec frame_with(std::uint64_t scene_seed, std::vector<PlacementSpec> placements, double light = kBright) {
  SceneSpec s;
  s.width = kFrameWidth;
  s.height = kFrameHeight;
  // Room lighting dims the background together with the face.
  s.background_level = static_cast<int>(std::floor(128.0 * light + 0.5));
  s.seed = scene_seed;
  s.placements = std::move(placements);
  return s;
}

PlacementSpec frontal(std::uint64_t identity_seed) {
  PlacementSpec p;
  p.identity_seed = identity_seed;
  p.x = kFaceX;
  p.y = kFaceY;
  p.size = kFaceSize;
  return p;
}

Expectation granted(const std::string& user) {
  Expectation e;
  e.decision = "GRANTED";
  e.reason = "GRANTED";
  e.user = user;
  return e;
}

Expectation denied(std::optional<std::string> reason = std::nullopt) {
  Expectation e;
  e.decision = "DENIED";
  e.reason = std::move(reason);
  return e;
}

void write_pgm(const fs::path& path, const Image& img) {
  atomic_write_file(path, encode_pgm(img));
}

std::string format_similarity(const std::optional<double>& s) {
  if (!s) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *s);
  return buf;
}

std::string describe(const Expectation& e) {
  std::string out = e.decision;
  if (e.reason && *e.reason != e.decision) out += " " + *e.reason;
  if (e.user) out += " as " + *e.user;
  char buf[64];
  if (e.similarity_min && e.similarity_below) {
    std::snprintf(buf, sizeof buf, " sim[%g,%g)", *e.similarity_min, *e.similarity_below);
    out += buf;
  } else if (e.similarity_min) {
    std::snprintf(buf, sizeof buf, " sim>=%g", *e.similarity_min);
    out += buf;
  } else if (e.similarity_below) {
    std::snprintf(buf, sizeof buf, " sim<%g", *e.similarity_below);
    out += buf;
  }
  return out;
}

}  // namespace

const char* scenario_title(int scenario) {
  switch (scenario) {
    case 1: return "registered vs unregistered";
    case 2: return "lighting";
    case 3: return "face rotation";
    case 4: return "accessories";
    case 5: return "multiple users";
    case 6: return "photo spoofing";
  }
  return "unknown";
}

double calibrate_liveness_threshold(const std::vector<CalibrationPair>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("no calibration pairs");
  double max_spoof = -std::numeric_limits<double>::infinity();
  double min_live = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) {
    max_spoof = std::max(max_spoof, p.spoof_energy);
    min_live = std::min(min_live, p.live_energy);
  }
  return 0.5 * (max_spoof + min_live);
}

Manifest build_corpus(std::uint64_t seed, const fs::path& out_dir) {
  try {
    ensure_writable_dir(out_dir);
  } catch (const StorageError& e) {
    throw std::runtime_error(std::string("corpus directory not writable: ") + e.what());
  }

  Manifest m;
  m.seed = seed;
  m.assumptions = {
      "faces are seeded procedural textures, not photographs",
      "similarity is the cosine of 16x16 row-centred crops on a 0-100 scale; the grant threshold of 80 is a "
      "configurable convention",
      "illumination levels bright=1.0, dim=0.4, dark=0.02 are multiplicative encodings, not lux measurements",
      "face edge length (16-64 px) stands in for distance to the camera; no physical distances are modelled",
      "yaw is modelled as loss of the rightmost face columns, replaced by face-like texture",
      "a spoof is a 3x3 box blur of the face (a re-photographed print)",
  };

  Xorshift64Star rng(mix_seed(seed));
  for (int i = 0; i < 3; ++i) m.identities.push_back({"reg-" + std::to_string(i), rng.next(), true});
  for (int i = 0; i < 2; ++i) m.identities.push_back({"unreg-" + std::to_string(i), rng.next(), false});
  const auto seed_of = [&](const std::string& label) {
    for (const auto& id : m.identities) {
      if (id.label == label) return id.identity_seed;
    }
    throw std::logic_error("unknown identity " + label);
  };
  std::uint64_t scene_counter = 0;
  const auto next_scene_seed = [&] { return mix_seed(seed ^ (0xA5A5000000000000ull + ++scene_counter)); };

  for (const auto& id : m.identities) {
    if (!id.registered) continue;
    Enrollment e{id.label, "enroll/" + id.label + ".pgm", frame_with(next_scene_seed(), {frontal(id.identity_seed)})};
    m.enrollments.push_back(std::move(e));
  }

  const auto add_probe = [&](int scenario, const std::string& id, const std::string& label, SceneSpec scene,
                             std::vector<ProbeRun> runs) {
    m.probes.push_back({id, scenario, label, "probes/" + id + ".pgm", std::move(scene), std::move(runs)});
  };
  const auto off = [](Expectation e) { return std::vector<ProbeRun>{{false, std::move(e)}}; };

  // S1
  add_probe(1, "s1-registered", "registered user, frontal", frame_with(next_scene_seed(), {frontal(seed_of("reg-0"))}),
            off(granted("reg-0")));
  add_probe(1, "s1-unregistered", "unregistered person, frontal",
            frame_with(next_scene_seed(), {frontal(seed_of("unreg-0"))}), off(denied("NO_MATCH")));

  // S2
  for (const auto& [name, level] : {std::pair{"bright", kBright}, std::pair{"dim", kDim}, std::pair{"dark", kDark}}) {
    auto p = frontal(seed_of("reg-1"));
    p.illumination = level;
    Expectation e = level == kDark ? denied() : granted("reg-1");
    if (level == kDark) e.note = kFailureModeNote;
    add_probe(2, std::string("s2-") + name, std::string(name) + " room", frame_with(next_scene_seed(), {p}, level),
              off(e));
  }

  // S3
  for (int yaw : kYawAngles) {
    auto p = frontal(seed_of("reg-2"));
    p.yaw_degrees = yaw;
    Expectation e = yaw == 0 ? granted("reg-2") : denied();
    if (yaw != 0) e.note = kFailureModeNote;
    add_probe(3, "s3-yaw" + std::to_string(yaw), "yaw " + std::to_string(yaw) + " deg",
              frame_with(next_scene_seed(), {p}), off(e));
  }

  // S4
  {
    auto p = frontal(seed_of("reg-0"));
    p.accessory = Accessory::sunglasses;
    Expectation e = granted("reg-0");
    e.similarity_min = 80.0;
    e.similarity_below = 100.0;
    add_probe(4, "s4-sunglasses", "sunglasses", frame_with(next_scene_seed(), {p}), off(e));
  }

  // S5: the nearer (larger) face must win.
  {
    PlacementSpec near_face{seed_of("reg-1"), 8, 24, 48};
    PlacementSpec far_face{seed_of("reg-2"), 88, 36, 24};
    add_probe(5, "s5-two-users", "two users, 48px and 24px", frame_with(next_scene_seed(), {near_face, far_face}),
              off(granted("reg-1")));
  }

  // S6
  {
    auto p = frontal(seed_of("reg-0"));
    p.spoof = true;
    Expectation vulnerable = granted("reg-0");
    vulnerable.similarity_min = 80.0;
    vulnerable.note = kVulnerabilityNote;
    Expectation fixed = denied("SPOOF_SUSPECTED");
    fixed.note = "liveness check enabled";
    add_probe(6, "s6-spoof", "printed photo of reg-0", frame_with(next_scene_seed(), {p}),
              {{false, vulnerable}, {true, fixed}});
  }

  // Liveness calibration: each registered identity rendered live and spoofed.
  for (const auto& id : m.identities) {
    if (!id.registered) continue;
    CalibrationPair pair{id.label, "calibration/" + id.label + "-live.pgm", "calibration/" + id.label + "-spoof.pgm"};
    auto live_scene = frame_with(next_scene_seed(), {frontal(id.identity_seed)});
    auto spoof_scene = live_scene;
    spoof_scene.placements[0].spoof = true;
    const Scene live = compose_scene(live_scene);
    const Scene spoof = compose_scene(spoof_scene);
    pair.live_energy = laplacian_energy(crop(live.frame, live.ground_truth[0].box));
    pair.spoof_energy = laplacian_energy(crop(spoof.frame, spoof.ground_truth[0].box));
    write_pgm(out_dir / pair.live_file, live.frame);
    write_pgm(out_dir / pair.spoof_file, spoof.frame);
    m.calibration.push_back(std::move(pair));
  }
  m.liveness_threshold = calibrate_liveness_threshold(m.calibration);

  for (const auto& e : m.enrollments) write_pgm(out_dir / e.file, compose_scene(e.scene).frame);
  for (const auto& p : m.probes) write_pgm(out_dir / p.file, compose_scene(p.scene).frame);

  atomic_write_file(out_dir / "manifest.json", json(m).dump(2) + "\n");
  return m;
}

Manifest load_manifest(const fs::path& corpus_dir) {
  const auto bytes = read_file(corpus_dir / "manifest.json");
  if (!bytes) throw std::runtime_error("no manifest.json in " + corpus_dir.string());
  return json::parse(bytes->begin(), bytes->end()).get<Manifest>();
}

bool matches(const Expectation& e, const AccessDecision& d) {
  if ((e.decision == "GRANTED") != d.granted) return false;
  if (e.reason && *e.reason != to_string(d.reason)) return false;
  if (e.user && d.display_name != e.user) return false;
  if (e.similarity_min && !(d.similarity && *d.similarity >= *e.similarity_min)) return false;
  if (e.similarity_below && !(d.similarity && *d.similarity < *e.similarity_below)) return false;
  return true;
}

Harness::Harness(edge::GatewayClient& client, Manifest manifest, fs::path corpus_dir)
    : client_(client), manifest_(std::move(manifest)), dir_(std::move(corpus_dir)) {}

void Harness::enroll(bool reverse_order) {
  if (!original_config_) original_config_ = client_.get_config();
  auto order = manifest_.enrollments;
  if (reverse_order) std::reverse(order.begin(), order.end());
  for (const auto& e : order) {
    const auto image = edge::capture(dir_ / e.file);
    const auto rec = client_.enroll(e.label, AccessLevel::standard, image);
    enrolled_[e.label] = rec.face_id;
  }
}

void Harness::set_liveness(bool enabled) {
  if (!original_config_) original_config_ = client_.get_config();
  GatewayConfig cfg = *original_config_;
  cfg.liveness_enabled = enabled;
  if (enabled) cfg.liveness_threshold = manifest_.liveness_threshold;
  const auto current = client_.get_config();
  if (!(current == cfg)) client_.put_config(cfg);
}

ScenarioReport Harness::run_scenario(int scenario) {
  ScenarioReport report;
  report.scenario = scenario;
  for (const auto& probe : manifest_.probes) {
    if (probe.scenario != scenario) continue;
    const auto image = edge::capture(dir_ / probe.file);
    for (const auto& run : probe.runs) {
      set_liveness(run.liveness_enabled);
      const auto d = client_.request_access("harness", image);
      CaseResult c;
      c.probe_id = probe.id;
      c.label = probe.label;
      c.liveness_enabled = run.liveness_enabled;
      c.expected = run.expect;
      c.decision = d.granted ? "GRANTED" : "DENIED";
      c.reason = to_string(d.reason);
      c.similarity = d.similarity;
      c.user = d.display_name;
      c.passed = matches(run.expect, d);
      report.cases.push_back(std::move(c));
    }
  }
  if (original_config_) {
    const auto current = client_.get_config();
    if (!(current == *original_config_)) client_.put_config(*original_config_);
  }
  report.passed = !report.cases.empty() &&
                  std::all_of(report.cases.begin(), report.cases.end(), [](const CaseResult& c) { return c.passed; });
  return report;
}

void Harness::cleanup() {
  for (const auto& [label, face_id] : enrolled_) client_.revoke(face_id);
  enrolled_.clear();
  if (original_config_) {
    const auto current = client_.get_config();
    if (!(current == *original_config_)) client_.put_config(*original_config_);
  }
}

nlohmann::json report_json(const Manifest& m, const std::vector<ScenarioReport>& reports) {
  json scenarios = json::array();
  int passed = 0;
  for (const auto& r : reports) {
    json cases = json::array();
    for (const auto& c : r.cases) {
      json actual{{"decision", c.decision}, {"reason", c.reason}};
      if (c.similarity) actual["similarity"] = *c.similarity;
      if (c.user) actual["user"] = *c.user;
      json jc{{"probe", c.probe_id},
              {"case", c.label},
              {"liveness_enabled", c.liveness_enabled},
              {"expected", c.expected},
              {"actual", actual},
              {"passed", c.passed}};
      cases.push_back(std::move(jc));
    }
    scenarios.push_back(
        {{"scenario", r.scenario}, {"title", scenario_title(r.scenario)}, {"passed", r.passed}, {"cases", cases}});
    if (r.passed) ++passed;
  }
  return json{{"seed", m.seed},
              {"assumptions", m.assumptions},
              {"liveness_threshold", m.liveness_threshold},
              {"scenarios", scenarios},
              {"scenarios_passed", passed},
              {"scenarios_run", reports.size()}};
}

std::string report_text(const std::vector<ScenarioReport>& reports) {
  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof line, "%-3s %-34s %-32s %-26s %8s  %-4s  %s\n", "S", "case", "expected", "actual",
                "sim", "ok", "note");
  out << line;
  int passed = 0;
  for (const auto& r : reports) {
    for (const auto& c : r.cases) {
      std::string label = c.label;
      if (r.scenario == 6) label += c.liveness_enabled ? " [liveness on]" : " [liveness off]";
      std::string actual = c.decision;
      if (c.reason != c.decision) actual += " " + c.reason;
      if (c.user && c.decision == "GRANTED") actual += " as " + *c.user;
      std::snprintf(line, sizeof line, "S%-2d %-34s %-32s %-26s %8s  %-4s  %s\n", r.scenario, label.c_str(),
                    describe(c.expected).c_str(), actual.c_str(), format_similarity(c.similarity).c_str(),
                    c.passed ? "PASS" : "FAIL", c.expected.note.value_or("").c_str());
      out << line;
    }
    if (r.passed) ++passed;
  }
  out << passed << "/" << reports.size() << " scenarios passed\n";
  return out.str();
}

RunSummary run_all(edge::GatewayClient& client, const fs::path& corpus_dir, std::optional<int> only) {
  const Manifest manifest = load_manifest(corpus_dir);
  Harness h(client, manifest, corpus_dir);

  RunSummary summary;
  h.enroll();
  try {
    for (int s = 1; s <= kScenarioCount; ++s) {
      if (only && *only != s) continue;
      summary.reports.push_back(h.run_scenario(s));
    }
  } catch (...) {
    try {
      h.cleanup();
    } catch (...) {
    }
    throw;
  }
  h.cleanup();

  summary.all_passed = !summary.reports.empty() &&
                       std::all_of(summary.reports.begin(), summary.reports.end(),
                                   [](const ScenarioReport& r) { return r.passed; });
  summary.report = report_json(manifest, summary.reports);
  summary.text = report_text(summary.reports);
  atomic_write_file(corpus_dir / "report.json", summary.report.dump(2) + "\n");
  return summary;
}

void to_json(json& j, const Expectation& e) {
  j = json{{"decision", e.decision}};
  if (e.reason) j["reason"] = *e.reason;
  if (e.user) j["user"] = *e.user;
  if (e.similarity_min) j["similarity_min"] = *e.similarity_min;
  if (e.similarity_below) j["similarity_below"] = *e.similarity_below;
  if (e.note) j["note"] = *e.note;
}

void from_json(const json& j, Expectation& e) {
  j.at("decision").get_to(e.decision);
  if (e.decision != "GRANTED" && e.decision != "DENIED") {
    throw std::invalid_argument("expected decision must be GRANTED or DENIED");
  }
  const auto opt_str = [&](const char* k) {
    return j.contains(k) ? std::optional(j[k].get<std::string>()) : std::nullopt;
  };
  const auto opt_num = [&](const char* k) {
    return j.contains(k) ? std::optional(j[k].get<double>()) : std::nullopt;
  };
  e.reason = opt_str("reason");
  e.user = opt_str("user");
  e.similarity_min = opt_num("similarity_min");
  e.similarity_below = opt_num("similarity_below");
  e.note = opt_str("note");
}

void to_json(json& j, const Manifest& m) {
  json ids = json::array();
  for (const auto& i : m.identities) {
    ids.push_back({{"label", i.label}, {"identity_seed", i.identity_seed}, {"registered", i.registered}});
  }
  json enrollments = json::array();
  for (const auto& e : m.enrollments) enrollments.push_back({{"label", e.label}, {"file", e.file}, {"scene", e.scene}});
  json probes = json::array();
  for (const auto& p : m.probes) {
    json runs = json::array();
    for (const auto& r : p.runs) runs.push_back({{"liveness_enabled", r.liveness_enabled}, {"expect", r.expect}});
    probes.push_back({{"id", p.id},
                      {"scenario", p.scenario},
                      {"case", p.label},
                      {"file", p.file},
                      {"scene", p.scene},
                      {"runs", runs}});
  }
  json pairs = json::array();
  for (const auto& c : m.calibration) {
    pairs.push_back({{"label", c.label},
                     {"live_file", c.live_file},
                     {"spoof_file", c.spoof_file},
                     {"live_energy", c.live_energy},
                     {"spoof_energy", c.spoof_energy}});
  }
  j = json{{"version", 1},
           {"seed", m.seed},
           {"assumptions", m.assumptions},
           {"identities", ids},
           {"enrollments", enrollments},
           {"probes", probes},
           {"liveness_calibration", {{"threshold", m.liveness_threshold}, {"pairs", pairs}}}};
}

void from_json(const json& j, Manifest& m) {
  j.at("seed").get_to(m.seed);
  m.assumptions = j.value("assumptions", std::vector<std::string>{});
  m.identities.clear();
  for (const auto& i : j.at("identities")) {
    m.identities.push_back(
        {i.at("label").get<std::string>(), i.at("identity_seed").get<std::uint64_t>(), i.at("registered").get<bool>()});
  }
  m.enrollments.clear();
  for (const auto& e : j.at("enrollments")) {
    m.enrollments.push_back({e.at("label").get<std::string>(), e.at("file").get<std::string>(),
                             e.at("scene").get<SceneSpec>()});
  }
  m.probes.clear();
  for (const auto& p : j.at("probes")) {
    Probe probe{p.at("id").get<std::string>(), p.at("scenario").get<int>(), p.at("case").get<std::string>(),
                p.at("file").get<std::string>(), p.at("scene").get<SceneSpec>(), {}};
    for (const auto& r : p.at("runs")) {
      probe.runs.push_back({r.at("liveness_enabled").get<bool>(), r.at("expect").get<Expectation>()});
    }
    m.probes.push_back(std::move(probe));
  }
  const auto& cal = j.at("liveness_calibration");
  cal.at("threshold").get_to(m.liveness_threshold);
  m.calibration.clear();
  for (const auto& c : cal.at("pairs")) {
    m.calibration.push_back({c.at("label").get<std::string>(), c.at("live_file").get<std::string>(),
                             c.at("spoof_file").get<std::string>(), c.at("live_energy").get<double>(),
                             c.at("spoof_energy").get<double>()});
  }
}

}  // namespace aegis::harness
