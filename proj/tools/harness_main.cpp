// harness: builds the synthetic corpus and replays the six scenarios
// against a running gateway.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aegis/harness.hpp"

namespace harness = aegis::harness;

int main(int argc, char** argv) {
  CLI::App app{"Scenario harness"};
  app.require_subcommand(1);

  std::uint64_t seed = harness::kDefaultCorpusSeed;
  std::string out_dir;
  auto* build = app.add_subcommand("build", "Generate a seeded corpus");
  build->add_option("--seed", seed, "Corpus seed");
  build->add_option("--out", out_dir, "Output directory")->required();

  std::optional<int> scenario;
  std::string gateway_url;
  std::string corpus_dir;
  auto* run = app.add_subcommand("run", "Run scenarios against a gateway");
  run->add_option("--scenario", scenario, "Run only this scenario")->check(CLI::Range(1, harness::kScenarioCount));
  run->add_option("--gateway", gateway_url, "Gateway base URL")->required();
  run->add_option("--corpus", corpus_dir, "Corpus directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      const auto m = harness::build_corpus(seed, out_dir);
      std::printf("corpus seed %llu: %zu enrollments, %zu probes, liveness threshold %.3f -> %s\n",
                  static_cast<unsigned long long>(seed), m.enrollments.size(), m.probes.size(),
                  m.liveness_threshold, out_dir.c_str());
      return 0;
    }

    aegis::edge::GatewayClient client(gateway_url);
    const auto summary = harness::run_all(client, corpus_dir, scenario);
    std::cout << summary.text;
    std::cout << (summary.all_passed ? "VERDICT: PASS" : "VERDICT: FAIL") << "\n";
    return summary.all_passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "harness: %s\n", e.what());
    return 2;
  }
}
