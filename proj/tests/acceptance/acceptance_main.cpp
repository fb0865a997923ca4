// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes. Tolerances and sample sizes are fixed below.

#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "aegis/credential_store.hpp"
#include "aegis/embedding.hpp"
#include "aegis/event_log.hpp"
#include "aegis/harness.hpp"
#include "aegis/object_store.hpp"
#include "aegis/pgm.hpp"
#include "aegis/recognition.hpp"
#include "aegis/synth.hpp"
#include "test_support.hpp"

using namespace aegis;
using namespace aegis::testing;
namespace fs = std::filesystem;
namespace harness = aegis::harness;

namespace {

constexpr double kMatrixWallClockLimitSeconds = 60.0;
constexpr double kSpoofGrantFloor = 80.0;
constexpr int kSpoofCorpusSeeds = 20;  // default seed plus 19 more
constexpr int kPropertyCases = 1000;
constexpr double kSelfSimilarityTolerance = 1e-6;
constexpr double kAffineTolerance = 1e-9;
constexpr int kOracleCollections = 200;
constexpr int kOracleMaxCollection = 10;
constexpr double kOracleScoreTolerance = 1e-9;
constexpr int kDetectionScenes = 100;
constexpr double kDetectionMinIou = 0.5;
constexpr int kDurabilityKills = 3;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// aegis-gateway child process on a fresh port.
class GatewayProcess {
 public:
  explicit GatewayProcess(const fs::path& data_root) : root_(data_root) { start(); }
  ~GatewayProcess() { stop(SIGTERM); }

  void start() {
    port_ = unused_port();
    pid_ = spawn_process({AEGIS_GATEWAY_BIN},
                         {"AEGIS_DATA_ROOT=" + root_.string(), "AEGIS_LISTEN=127.0.0.1:" + std::to_string(port_)});
    if (!wait_for_port(port_)) throw std::runtime_error("gateway did not come up");
  }

  void stop(int sig) {
    if (pid_ <= 0) return;
    ::kill(pid_, sig);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  fs::path root_;
  pid_t pid_ = -1;
  int port_ = 0;
};

struct CliRun {
  ProcessResult result;
  double seconds = 0;
};

CliRun harness_cli(const std::vector<std::string>& args) {
  std::vector<std::string> argv{AEGIS_HARNESS_BIN};
  argv.insert(argv.end(), args.begin(), args.end());
  const auto t0 = std::chrono::steady_clock::now();
  CliRun r{run_process(argv), 0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// 1 -------------------------------------------------------------------------
Outcome scenario_matrix() {
  TempDir work("aegis-c1");
  const auto corpus = (work / "corpus").string();
  const auto t0 = std::chrono::steady_clock::now();
  const auto built = harness_cli({"build", "--seed", std::to_string(harness::kDefaultCorpusSeed), "--out", corpus});
  if (built.result.exit_code != 0) return {false, "corpus build failed: " + built.result.err};
  GatewayProcess gw(work / "data");
  const auto run = harness_cli({"run", "--gateway", gw.url(), "--corpus", corpus});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto report = nlohmann::json::parse(slurp(work / "corpus/report.json"));
  int cases = 0, passed_cases = 0;
  for (const auto& s : report.at("scenarios")) {
    for (const auto& c : s.at("cases")) {
      ++cases;
      if (c.at("passed").get<bool>()) ++passed_cases;
    }
  }
  const int scenarios = report.at("scenarios_passed").get<int>();
  const bool ok = run.result.exit_code == 0 && scenarios == 6 && cases == 12 && passed_cases == 12 &&
                  seconds < kMatrixWallClockLimitSeconds;
  std::string detail = std::to_string(scenarios) + "/6 scenarios, " + std::to_string(passed_cases) + "/" +
                       std::to_string(cases) + " cases, exit " + std::to_string(run.result.exit_code) + ", " +
                       fmt("%.2f", seconds) + " s (limit " + fmt("%.0f", kMatrixWallClockLimitSeconds) + " s)";
  if (!ok) detail += "\n" + run.result.out + run.result.err;
  return {ok, detail};
}

// 2 -------------------------------------------------------------------------
Outcome spoof_pairs() {
  int pairs = 0, ok = 0;
  std::string first_failure;
  double min_spoof_similarity = 100.0;
  for (int i = 0; i < kSpoofCorpusSeeds; ++i) {
    const std::uint64_t seed = i == 0 ? harness::kDefaultCorpusSeed : 1000 + i;
    TempDir corpus("aegis-c2"), data("aegis-c2-data");
    const auto m = harness::build_corpus(seed, corpus.path());
    LocalGateway server(data.path());
    edge::GatewayClient client(server.url());
    for (const auto& e : m.enrollments) client.enroll(e.label, AccessLevel::standard, edge::capture(corpus / e.file));

    for (const auto& pair : m.calibration) {
      ++pairs;
      const auto spoof = edge::capture(corpus / pair.spoof_file);
      GatewayConfig cfg;
      cfg.liveness_enabled = false;
      client.put_config(cfg);
      const auto off = client.request_access("c2", spoof);
      cfg.liveness_enabled = true;
      cfg.liveness_threshold = m.liveness_threshold;
      client.put_config(cfg);
      const auto on = client.request_access("c2", spoof);
      const bool pass = off.granted && off.display_name == pair.label && off.similarity &&
                        *off.similarity >= kSpoofGrantFloor && !on.granted && on.reason == Reason::spoof_suspected;
      if (off.similarity) min_spoof_similarity = std::min(min_spoof_similarity, *off.similarity);
      if (pass) {
        ++ok;
      } else if (first_failure.empty()) {
        first_failure = " first failure: seed " + std::to_string(seed) + " " + pair.label;
      }
    }
  }
  return {ok == pairs, std::to_string(ok) + "/" + std::to_string(pairs) + " registered identities over " +
                           std::to_string(kSpoofCorpusSeeds) + " corpora; min liveness-off similarity " +
                           fmt("%.2f", min_spoof_similarity) + first_failure};
}

// 3 -------------------------------------------------------------------------
Outcome scoring_properties() {
  std::mt19937_64 rng(0xC3);
  std::uniform_int_distribution<int> dim(16, 64);
  int symmetric = 0, bounded = 0, self = 0, affine = 0;
  for (int i = 0; i < kPropertyCases; ++i) {
    const auto a = embed(random_image(rng, dim(rng), dim(rng)));
    const auto b = embed(random_image(rng, dim(rng), dim(rng)));
    const double ab = similarity(a, b), ba = similarity(b, a);
    if (ab == ba) ++symmetric;
    if (ab >= 0.0 && ab <= 100.0) ++bounded;
    const double raw_self = a.dot(a) * 100.0;
    if (std::fabs(raw_self - 100.0) <= kSelfSimilarityTolerance && std::fabs(similarity(a, a) - 100.0) <= kSelfSimilarityTolerance) {
      ++self;
    }
  }
  // Affine intensity: t = s*q + o with integer s, o keeps every value
  // integral and inside [64, 192] x s + o <= 255; q is block constant so
  // resampling is exact.
  std::uniform_int_distribution<int> scale(1, 2), block(1, 4);
  for (int i = 0; i < kPropertyCases; ++i) {
    const int s = scale(rng), k = block(rng);
    const int hi = s == 1 ? 192 : 127;
    const Image small = random_image(rng, 16, 16, 64 / s, hi);
    const int o = std::uniform_int_distribution<int>(0, 255 - s * hi)(rng);
    Image q(16 * k, 16 * k), t(16 * k, 16 * k);
    for (int y = 0; y < 16 * k; ++y) {
      for (int x = 0; x < 16 * k; ++x) {
        q.at(x, y) = small.at(x / k, y / k);
        t.at(x, y) = static_cast<std::uint8_t>(s * small.at(x / k, y / k) + o);
      }
    }
    const auto eq = embed(q), et = embed(t);
    double worst = 0.0;
    for (std::size_t d = 0; d < kEmbeddingDim; ++d) worst = std::max(worst, std::fabs(eq.values[d] - et.values[d]));
    if (worst <= kAffineTolerance) ++affine;
  }
  const int n = kPropertyCases;
  const bool ok = symmetric == n && bounded == n && self == n && affine == n;
  return {ok, "symmetric " + std::to_string(symmetric) + "/" + std::to_string(n) + ", bounded " +
                  std::to_string(bounded) + "/" + std::to_string(n) + ", self=100 " + std::to_string(self) + "/" +
                  std::to_string(n) + ", affine-invariant " + std::to_string(affine) + "/" + std::to_string(n)};
}

// 4 -------------------------------------------------------------------------
Outcome oracle_equivalence() {
  std::mt19937_64 rng(0xC4);
  int agree = 0, nonempty = 0;
  double worst = 0.0;
  for (int trial = 0; trial < kOracleCollections; ++trial) {
    const int n = std::uniform_int_distribution<int>(0, kOracleMaxCollection)(rng);
    std::vector<FaceRecord> coll;
    std::vector<Image> members;
    for (int k = 0; k < n; ++k) {
      members.push_back(random_image(rng, 16, 16));
      char id[17];
      std::snprintf(id, sizeof id, "%016llx", static_cast<unsigned long long>(rng()));
      coll.push_back(FaceRecord{id, "u", "", embed(members.back()), ""});
    }
    Image probe_img = random_image(rng, 16, 16);
    if (n > 0 && trial % 2 == 0) {
      const Image& m = members[std::uniform_int_distribution<int>(0, n - 1)(rng)];
      std::uniform_int_distribution<int> noise(-25, 25);
      for (std::size_t p = 0; p < probe_img.pixels.size(); ++p) {
        probe_img.pixels[p] = round_to_gray(m.pixels[p] + noise(rng));
      }
    }
    // The oracle builds its probe vector itself and normalizes it.
    auto probe_vec = oracle_embedding_16(probe_img);
    double norm = 0.0;
    for (double v : probe_vec) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : probe_vec) v /= norm;

    const double threshold = trial % 4 == 0 ? 0.0 : std::uniform_real_distribution<double>(0, 100)(rng);
    const auto got = search_collection(embed(probe_img), coll, threshold);
    const auto want = oracle_search(probe_vec, coll, threshold);
    bool same = got.has_value() == want.has_value();
    if (same && got) {
      ++nonempty;
      worst = std::max(worst, std::fabs(got->similarity - want->score));
      same = got->face_id == want->face_id && std::fabs(got->similarity - want->score) <= kOracleScoreTolerance;
    }
    if (same) ++agree;
  }
  return {agree == kOracleCollections, std::to_string(agree) + "/" + std::to_string(kOracleCollections) +
                                           " collections agree (" + std::to_string(nonempty) +
                                           " with a winner), max score gap " + fmt("%.1e", worst)};
}

// 5 -------------------------------------------------------------------------
Outcome detection_geometry() {
  std::mt19937_64 rng(0xC5);
  int single_ok = 0, dark_ok = 0;
  double min_iou = 1.0;
  std::string first_failure;
  for (int i = 0; i < kDetectionScenes; ++i) {
    const int size = kFaceSizes[i % kFaceSizes.size()];
    SceneSpec s;
    s.seed = rng();
    PlacementSpec p;
    p.identity_seed = rng();
    p.size = size;
    p.x = std::uniform_int_distribution<int>(0, s.width - size)(rng);
    p.y = std::uniform_int_distribution<int>(0, s.height - size)(rng);
    s.placements.push_back(p);
    const auto scene = compose_scene(s);
    const auto boxes = detect_faces(scene.frame);
    if (boxes.size() == 1) {
      const double overlap = iou(boxes[0], scene.ground_truth[0].box);
      min_iou = std::min(min_iou, overlap);
      if (overlap >= kDetectionMinIou) ++single_ok;
    } else {
      min_iou = 0.0;
      if (first_failure.empty()) first_failure = "; scene " + std::to_string(i) + " gave " + std::to_string(boxes.size());
    }

    // Same scene with the lights off.
    SceneSpec dark = s;
    dark.background_level = static_cast<int>(std::floor(s.background_level * kDark + 0.5));
    dark.placements[0].illumination = kDark;
    if (detect_faces(compose_scene(dark).frame).empty()) ++dark_ok;
  }
  return {single_ok == kDetectionScenes && dark_ok == kDetectionScenes,
          "single-face " + std::to_string(single_ok) + "/" + std::to_string(kDetectionScenes) + " (min IoU " +
              fmt("%.3f", min_iou) + "), dark empty " + std::to_string(dark_ok) + "/" +
              std::to_string(kDetectionScenes) + first_failure};
}

// 6 -------------------------------------------------------------------------
Outcome storage_durability() {
  std::vector<std::string> problems;

  // (a) A gateway process is killed with SIGKILL after acknowledged writes;
  // a restarted process must serve the same state.
  TempDir work("aegis-c6");
  TempDir corpus("aegis-c6-corpus");
  const auto m = harness::build_corpus(harness::kDefaultCorpusSeed, corpus.path());
  std::vector<EnrollmentRecord> enrolled;
  std::vector<AccessEvent> before_events;
  std::vector<AccessDecision> before_decisions;
  GatewayConfig tuned;
  tuned.similarity_threshold = 85;
  {
    GatewayProcess gw(work / "data");
    edge::GatewayClient client(gw.url());
    for (const auto& e : m.enrollments) {
      enrolled.push_back(client.enroll(e.label, AccessLevel::standard, edge::capture(corpus / e.file)));
    }
    client.put_config(tuned);
    for (const auto& p : m.probes) before_decisions.push_back(client.request_access("c6", edge::capture(corpus / p.file)));
    before_events = client.events(0, 1000);
    gw.stop(SIGKILL);
  }
  {
    GatewayProcess gw(work / "data");
    edge::GatewayClient client(gw.url());
    if (client.events(0, 1000) != before_events) problems.push_back("event log differs after restart");
    if (client.get_config() != tuned) problems.push_back("config lost");
    for (std::size_t i = 0; i < m.probes.size(); ++i) {
      auto d = client.request_access("c6", edge::capture(corpus / m.probes[i].file));
      if (d != before_decisions[i]) problems.push_back("decision changed for " + m.probes[i].id);
    }
    const auto after = client.events(0, 1000);
    for (std::size_t i = 0; i < after.size(); ++i) {
      if (after[i].event_id != i + 1) {
        problems.push_back("event ids not contiguous");
        break;
      }
    }
    gw.stop(SIGTERM);
  }
  ObjectStore objects(work / "data");
  CredentialStore creds(work / "data");
  for (std::size_t i = 0; i < enrolled.size(); ++i) {
    const auto face = creds.get_face(enrolled[i].face_id);
    const auto key = enrolled[i].object_key.substr(enrolled[i].object_key.find('/') + 1);
    const auto stored = objects.get("faces", key);
    const auto original = edge::capture(corpus / m.enrollments[i].file);
    if (!face || !stored || *stored != original) problems.push_back("enrollment " + m.enrollments[i].label + " lost");
  }

  // (b) Writers killed mid-stream: objects are whole, tables parse, the log
  // ends on a complete event.
  TempDir crash("aegis-c6-crash");
  std::uint64_t events_seen = 0;
  for (int round = 0; round < kDurabilityKills; ++round) {
    const pid_t pid = ::fork();
    if (pid == 0) {
      ObjectStore o(crash.path());
      CredentialStore c(crash.path());
      EventLog log(crash.path());
      for (int i = 0;; ++i) {
        const std::string key = "obj" + std::to_string(i % 5);
        std::string payload(static_cast<std::size_t>(512 + i % 4096), static_cast<char>('a' + i % 26));
        payload = key + ":" + std::to_string(payload.size()) + ":" + payload;
        o.put("b", key, std::vector<std::uint8_t>(payload.begin(), payload.end()));
        c.put(UserRecord{"u" + std::to_string(i % 3), "n" + std::to_string(i), AccessLevel::standard, true});
        AccessEvent ev;
        ev.device_id = "crash-" + std::to_string(i);
        log.append(ev);
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(200 + 90 * round));
    ::kill(pid, SIGKILL);
    ::waitpid(pid, nullptr, 0);
    try {
      ObjectStore o(crash.path());
      for (const auto& key : o.list("b")) {
        const auto data = o.get("b", key);
        const std::string s(data->begin(), data->end());
        const auto a = s.find(':'), b = s.find(':', a + 1);
        if (s.substr(0, a) != key || std::stoul(s.substr(a + 1, b - a - 1)) != s.size() - b - 1) {
          problems.push_back("torn object " + key);
        }
      }
      CredentialStore c(crash.path());
      c.list_users();
      EventLog log(crash.path());
      const auto evs = log.list(0, 100000000);
      for (std::size_t i = 0; i < evs.size(); ++i) {
        if (evs[i].event_id != i + 1) {
          problems.push_back("event order broken after kill");
          break;
        }
      }
      if (evs.size() < events_seen) problems.push_back("acknowledged events lost");
      events_seen = evs.size();
    } catch (const std::exception& e) {
      problems.push_back(std::string("reopen failed: ") + e.what());
    }
  }

  std::string detail = std::to_string(enrolled.size()) + " enrollments, " + std::to_string(before_events.size()) +
                       " events survive SIGKILL; " + std::to_string(kDurabilityKills) +
                       " mid-write kills leave whole objects/tables and " + std::to_string(events_seen) +
                       " ordered events";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

// 7 -------------------------------------------------------------------------
Outcome end_to_end_determinism() {
  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    TempDir work("aegis-c7");
    const auto corpus = (work / "corpus").string();
    harness_cli({"build", "--seed", std::to_string(harness::kDefaultCorpusSeed), "--out", corpus});
    GatewayProcess gw(work / "data");
    const auto r = harness_cli({"run", "--gateway", gw.url(), "--corpus", corpus});
    if (r.result.exit_code != 0) return {false, "harness run " + std::to_string(run) + " exited " + std::to_string(r.result.exit_code)};
    reports.push_back(slurp(work / "corpus/report.json"));
  }
  const bool same = !reports[0].empty() && reports[0] == reports[1];
  return {same, std::to_string(reports[0].size()) + " bytes, " + (same ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"scenario matrix", scenario_matrix},
      {"spoof pair", spoof_pairs},
      {"scoring properties", scoring_properties},
      {"oracle equivalence", oracle_equivalence},
      {"detection geometry", detection_geometry},
      {"storage durability", storage_durability},
      {"end-to-end determinism", end_to_end_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::printf("%s criterion %zu (%s): %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
