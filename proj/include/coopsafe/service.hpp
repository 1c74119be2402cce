#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "coopsafe/scenario.hpp"

namespace coopsafe {

struct ServiceOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8400;  // 0 picks a free port
  std::size_t decimation = 10;  // broadcast every n-th tick
  std::size_t queue_depth = 32;  // per-client telemetry backlog, oldest dropped
  bool start_paused = false;
  // Pacing of the simulation thread; the scenario's value is used when unset
  // and 1 when that is 0.
  double realtime_factor = 0.0;
};

// Live simulation behind a websocket (/ws) and two read-only HTTP endpoints
// (GET /state, GET /scenario), all on one port.
class Service {
 public:
  Service(Scenario scenario, ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and spawns the network and simulation threads.
  void start();
  // Port actually bound; differs from options.port when that was 0.
  unsigned short port() const;
  void stop();
  // Blocks until stop() is called from another thread or a signal arrives.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace coopsafe
