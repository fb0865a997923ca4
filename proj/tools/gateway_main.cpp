// aegis-gateway: serves the access-control API over HTTP.
//
//   AEGIS_DATA_ROOT  storage root (default ./aegis-data)
//   AEGIS_LISTEN     host:port (default 127.0.0.1:8080)
//   AEGIS_ID_SEED    optional; makes generated ids reproducible

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "aegis/fs_util.hpp"
#include "aegis/http_service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Face-recognition access gateway"};
  std::string data_root = "aegis-data";
  std::string listen = "127.0.0.1:8080";
  std::optional<std::uint64_t> id_seed;
  app.add_option("--data-root", data_root, "Storage root")->envname("AEGIS_DATA_ROOT");
  app.add_option("--listen", listen, "host:port to bind")->envname("AEGIS_LISTEN");
  app.add_option("--id-seed", id_seed, "Seed for generated ids")->envname("AEGIS_ID_SEED");
  CLI11_PARSE(app, argc, argv);

  std::pair<std::string, int> addr;
  try {
    addr = aegis::parse_listen_address(listen);
    aegis::ensure_writable_dir(data_root);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "aegis-gateway: %s\n", e.what());
    return 1;
  }

  // Block termination signals before any thread starts; a watcher thread
  // receives them with sigwait and stops the server.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  try {
    aegis::Gateway gateway(data_root, aegis::GatewayOptions{id_seed});
    aegis::HttpService service(gateway);
    const int port = service.bind(addr.first, addr.second);
    if (port < 0) {
      std::fprintf(stderr, "aegis-gateway: cannot bind %s\n", listen.c_str());
      return 1;
    }
    std::fprintf(stderr, "aegis-gateway: serving %s on %s:%d\n", data_root.c_str(), addr.first.c_str(), port);

    std::thread watcher([&] {
      int sig = 0;
      sigwait(&stop_signals, &sig);
      service.stop();
    });
    service.serve();
    // serve() can also return on its own (socket error); wake the watcher.
    pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "aegis-gateway: %s\n", e.what());
    return 1;
  }
  return 0;
}
