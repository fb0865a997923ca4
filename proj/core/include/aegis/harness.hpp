#pragma once

// Scenario harness: builds a seeded synthetic corpus covering the six
// evaluation scenarios, drives a running gateway through it, and checks every
// decision against the expectations recorded in the corpus manifest.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aegis/edge.hpp"
#include "aegis/synth.hpp"

namespace aegis::harness {

inline constexpr std::uint64_t kDefaultCorpusSeed = 7;
inline constexpr int kScenarioCount = 6;

struct Identity {
  std::string label;
  std::uint64_t identity_seed = 0;
  bool registered = false;
};

struct Enrollment {
  std::string label;
  std::string file;
  SceneSpec scene;
};

struct Expectation {
  std::string decision;  // "GRANTED" or "DENIED"
  std::optional<std::string> reason;
  std::optional<std::string> user;  // identity label of the granted user
  std::optional<double> similarity_min;
  std::optional<double> similarity_below;  // exclusive upper bound
  std::optional<std::string> note;
};

/// One submission of a probe under a given liveness setting.
struct ProbeRun {
  bool liveness_enabled = false;
  Expectation expect;
};

struct Probe {
  std::string id;
  int scenario = 0;
  std::string label;
  std::string file;
  SceneSpec scene;
  std::vector<ProbeRun> runs;
};

struct CalibrationPair {
  std::string label;
  std::string live_file;
  std::string spoof_file;
  double live_energy = 0.0;
  double spoof_energy = 0.0;
};

struct Manifest {
  std::uint64_t seed = 0;
  std::vector<std::string> assumptions;
  std::vector<Identity> identities;
  std::vector<Enrollment> enrollments;
  std::vector<Probe> probes;
  std::vector<CalibrationPair> calibration;
  double liveness_threshold = 0.0;
};

/// Generates the corpus under `out_dir` and writes manifest.json there.
Manifest build_corpus(std::uint64_t seed, const std::filesystem::path& out_dir);

Manifest load_manifest(const std::filesystem::path& corpus_dir);

/// Midpoint between the largest spoof energy and the smallest live energy.
double calibrate_liveness_threshold(const std::vector<CalibrationPair>& pairs);

const char* scenario_title(int scenario);

struct CaseResult {
  std::string probe_id;
  std::string label;
  bool liveness_enabled = false;
  Expectation expected;
  std::string decision;  // actual: "GRANTED" / "DENIED"
  std::string reason;
  std::optional<double> similarity;
  std::optional<std::string> user;
  bool passed = false;
};

struct ScenarioReport {
  int scenario = 0;
  std::vector<CaseResult> cases;
  bool passed = false;
};

/// Checks one decision against an expectation.
bool matches(const Expectation& expected, const AccessDecision& actual);

class Harness {
 public:
  Harness(edge::GatewayClient& client, Manifest manifest, std::filesystem::path corpus_dir);

  /// Enrolls every registered identity (in manifest order, or the reverse).
  void enroll(bool reverse_order = false);
  ScenarioReport run_scenario(int scenario);
  /// Revokes this harness's enrollments and restores the starting config.
  void cleanup();

  const Manifest& manifest() const { return manifest_; }
  /// identity label -> face_id for faces enrolled by this harness.
  const std::map<std::string, std::string>& enrolled() const { return enrolled_; }

 private:
  void set_liveness(bool enabled);

  edge::GatewayClient& client_;
  Manifest manifest_;
  std::filesystem::path dir_;
  std::map<std::string, std::string> enrolled_;
  std::optional<GatewayConfig> original_config_;
};

struct RunSummary {
  std::vector<ScenarioReport> reports;
  std::string text;
  nlohmann::json report;
  bool all_passed = false;
};

/// Enrolls, runs the requested scenarios (all when `only` is empty) in
/// order, cleans up, and writes <corpus_dir>/report.json.
RunSummary run_all(edge::GatewayClient& client, const std::filesystem::path& corpus_dir,
                   std::optional<int> only = std::nullopt);

nlohmann::json report_json(const Manifest& manifest, const std::vector<ScenarioReport>& reports);
std::string report_text(const std::vector<ScenarioReport>& reports);

void to_json(nlohmann::json& j, const Expectation& e);
void from_json(const nlohmann::json& j, Expectation& e);
void to_json(nlohmann::json& j, const Manifest& m);
void from_json(const nlohmann::json& j, Manifest& m);

}  // namespace aegis::harness
