// edge: entry-point agent. Reads a frame from disk, asks the gateway for a
// decision, prints the verdict and drives the door-state file.
//
// Exit codes: 0 round-trip completed (granted or denied), 2 input error,
// 3 gateway unreachable after retry, 4 gateway returned an error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "aegis/edge.hpp"

namespace fs = std::filesystem;
namespace edge = aegis::edge;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct RequestOptions {
  std::string image;
  std::string watch_dir;
  std::string gateway;
  std::string device;
  int hold = 5;
  std::string door_state;
  bool drain = false;
  int poll_ms = 200;
};

void request_once(edge::GatewayClient& client, const RequestOptions& opt, const fs::path& image) {
  const auto bytes = edge::capture(image);
  const auto decision = client.request_access(opt.device, bytes);
  std::printf("%s\n", edge::verdict_line(decision).c_str());
  std::fflush(stdout);
  if (!opt.door_state.empty()) edge::actuate_door(decision, std::chrono::seconds(opt.hold), opt.door_state);
}

std::vector<fs::path> pending_files(const fs::path& dir, const std::set<fs::path>& seen) {
  std::vector<fs::path> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file(ec) && !seen.contains(entry.path())) out.push_back(entry.path());
  }
  if (ec) throw edge::InputError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

bool door_settled(const RequestOptions& opt) {
  if (opt.door_state.empty()) return true;
  const auto s = edge::relock_if_expired(opt.door_state);
  return !s || !s->unlocked;
}

// Processes files in name order as they appear. A bad frame is reported and
// skipped; gateway failures end the loop.
int watch(edge::GatewayClient& client, const RequestOptions& opt) {
  if (!fs::is_directory(opt.watch_dir)) throw edge::InputError("not a directory: " + opt.watch_dir);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  std::set<fs::path> seen;
  int status = edge::kExitOk;
  while (!g_stop) {
    const auto files = pending_files(opt.watch_dir, seen);
    for (const auto& f : files) {
      seen.insert(f);
      try {
        request_once(client, opt, f);
      } catch (const edge::InputError& e) {
        std::fprintf(stderr, "edge: %s: %s\n", f.filename().c_str(), e.what());
        status = edge::kExitInput;
      }
      if (g_stop) break;
    }
    const bool settled = door_settled(opt);
    if (opt.drain && files.empty() && settled) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(opt.poll_ms));
  }
  return status;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const edge::InputError& e) {
    std::fprintf(stderr, "edge: %s\n", e.what());
    return edge::kExitInput;
  } catch (const edge::NetworkError& e) {
    std::fprintf(stderr, "edge: %s\n", e.what());
    return edge::kExitNetwork;
  } catch (const edge::ServerError& e) {
    std::fprintf(stderr, "edge: HTTP %d: %s\n", e.status(), e.body().c_str());
    return edge::kExitServer;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "edge: %s\n", e.what());
    return edge::kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entry-point edge agent"};
  app.require_subcommand(1);

  RequestOptions req;
  auto* request = app.add_subcommand("request", "Submit a frame and actuate the door");
  auto* image_opt = request->add_option("--image", req.image, "PGM frame to submit");
  auto* watch_opt = request->add_option("--watch", req.watch_dir, "Process frames appearing in this directory");
  image_opt->excludes(watch_opt);
  request->add_option("--gateway", req.gateway, "Gateway base URL")->required();
  request->add_option("--device", req.device, "Device id")->required();
  request->add_option("--hold", req.hold, "Seconds the door stays unlocked")->check(CLI::NonNegativeNumber);
  request->add_option("--door-state", req.door_state, "Door state file (relay stand-in)");
  request->add_flag("--drain", req.drain, "With --watch: exit once the directory is processed and the door relocked");
  request->add_option("--poll-ms", req.poll_ms, "With --watch: polling interval")->check(CLI::PositiveNumber);

  std::string enroll_image, enroll_name, enroll_gateway, enroll_level = "standard";
  auto* enroll = app.add_subcommand("enroll", "Register a face");
  enroll->add_option("--image", enroll_image, "PGM frame with one face")->required();
  enroll->add_option("--name", enroll_name, "Display name")->required();
  enroll->add_option("--gateway", enroll_gateway, "Gateway base URL")->required();
  enroll->add_option("--access-level", enroll_level, "standard or admin")
      ->check(CLI::IsMember({"standard", "admin"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : edge::kExitInput;
  }

  if (*request) {
    if (req.image.empty() && req.watch_dir.empty()) {
      std::fprintf(stderr, "edge: request needs --image or --watch\n");
      return edge::kExitInput;
    }
    return run_guarded([&] {
      edge::GatewayClient client(req.gateway);
      if (!req.watch_dir.empty()) return watch(client, req);
      if (!req.door_state.empty()) edge::relock_if_expired(req.door_state);
      request_once(client, req, req.image);
      return static_cast<int>(edge::kExitOk);
    });
  }

  return run_guarded([&] {
    edge::GatewayClient client(enroll_gateway);
    const auto bytes = edge::capture(enroll_image);
    const auto rec = client.enroll(enroll_name, aegis::access_level_from_string(enroll_level), bytes);
    std::printf("ENROLLED: %s user_id=%s face_id=%s\n", enroll_name.c_str(), rec.user_id.c_str(),
                rec.face_id.c_str());
    return static_cast<int>(edge::kExitOk);
  });
}
