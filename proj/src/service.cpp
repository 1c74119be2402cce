#include "coopsafe/service.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <condition_variable>
#include <deque>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "coopsafe/errors.hpp"
#include "coopsafe/simulator.hpp"
#include "coopsafe/telemetry.hpp"

namespace coopsafe {
namespace {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

using Frame = std::shared_ptr<const std::string>;

class Hub;

// One websocket client. Reads commands, writes queued telemetry frames; all
// handlers run on the session strand.
class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Hub& hub)
      : ws_(std::move(socket)), hub_(hub) {}

  void run(http::request<http::string_body> req);
  void send(Frame frame);

 private:
  void on_accept(beast::error_code ec);
  void read();
  void on_read(beast::error_code ec, std::size_t);
  void write_next();
  void on_write(beast::error_code ec, std::size_t);

  websocket::stream<beast::tcp_stream> ws_;
  Hub& hub_;
  beast::flat_buffer buffer_;
  std::deque<Frame> queue_;
  bool writing_ = false;
  bool open_ = false;
};

// Shared between the network side and the simulation thread.
class Hub {
 public:
  Hub(std::size_t depth, std::string scenario_doc)
      : depth_(depth), scenario_doc_(std::move(scenario_doc)) {}

  void add(const std::shared_ptr<WsSession>& s) {
    std::lock_guard lock(mutex_);
    sessions_.insert(s);
  }
  void remove(const std::shared_ptr<WsSession>& s) {
    std::lock_guard lock(mutex_);
    sessions_.erase(s);
  }
  std::vector<std::shared_ptr<WsSession>> sessions() const {
    std::lock_guard lock(mutex_);
    return {sessions_.begin(), sessions_.end()};
  }
  void close_all() {
    std::lock_guard lock(mutex_);
    sessions_.clear();
  }

  void publish(Frame frame) {
    {
      std::lock_guard lock(mutex_);
      latest_ = frame;
    }
    for (const auto& s : sessions()) s->send(frame);
  }
  Frame latest() const {
    std::lock_guard lock(mutex_);
    return latest_;
  }

  void push_command(const ClientCommand& cmd) {
    std::lock_guard lock(mutex_);
    commands_.push_back(cmd);
  }
  std::vector<ClientCommand> drain_commands() {
    std::lock_guard lock(mutex_);
    std::vector<ClientCommand> out(commands_.begin(), commands_.end());
    commands_.clear();
    return out;
  }

  std::size_t depth() const { return depth_; }
  const std::string& scenario_doc() const { return scenario_doc_; }

 private:
  mutable std::mutex mutex_;
  std::set<std::shared_ptr<WsSession>> sessions_;
  std::deque<ClientCommand> commands_;
  Frame latest_;
  std::size_t depth_;
  std::string scenario_doc_;
};

void WsSession::run(http::request<http::string_body> req) {
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
}

void WsSession::on_accept(beast::error_code ec) {
  if (ec) return;
  open_ = true;
  ws_.text(true);
  hub_.add(shared_from_this());
  if (Frame latest = hub_.latest()) send(latest);
  read();
}

void WsSession::send(Frame frame) {
  net::post(ws_.get_executor(), [self = shared_from_this(), frame = std::move(frame)]() mutable {
    if (!self->open_) return;
    self->queue_.push_back(std::move(frame));
    // The frame being written stays at the front until its write completes.
    const std::size_t protected_front = self->writing_ ? 1 : 0;
    while (self->queue_.size() > self->hub_.depth() + protected_front) {
      self->queue_.erase(self->queue_.begin() + static_cast<std::ptrdiff_t>(protected_front));
    }
    if (!self->writing_) self->write_next();
  });
}

void WsSession::read() {
  ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
}

void WsSession::on_read(beast::error_code ec, std::size_t) {
  if (ec) {
    open_ = false;
    hub_.remove(shared_from_this());
    return;
  }
  const std::string text = beast::buffers_to_string(buffer_.data());
  buffer_.consume(buffer_.size());
  const CommandParse parsed = parse_command(text);
  if (parsed.command) {
    hub_.push_command(*parsed.command);
  } else {
    queue_.push_front(std::make_shared<const std::string>(error_json(parsed.error)));
    if (writing_) std::swap(queue_[0], queue_[1]);
    if (!writing_) write_next();
  }
  read();
}

void WsSession::write_next() {
  if (queue_.empty() || !open_) {
    writing_ = false;
    return;
  }
  writing_ = true;
  ws_.async_write(net::buffer(*queue_.front()),
                  beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
}

void WsSession::on_write(beast::error_code ec, std::size_t) {
  queue_.pop_front();
  if (ec) {
    open_ = false;
    writing_ = false;
    hub_.remove(shared_from_this());
    return;
  }
  write_next();
}

// Plain HTTP connection; upgrades to a WsSession on /ws.
class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Hub& hub) : stream_(std::move(socket)), hub_(hub) {}

  void run() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    const std::string target(req_.target());
    if (target == "/ws" && websocket::is_upgrade(req_)) {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), hub_)->run(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(req_.keep_alive());
    res->set(http::field::server, "coopsafe");
    res->set(http::field::access_control_allow_origin, "*");
    if (req_.method() != http::verb::get) {
      res->result(http::status::method_not_allowed);
      res->set(http::field::content_type, "application/json");
      res->body() = error_json("only GET is supported");
    } else if (target == "/state") {
      const Frame latest = hub_.latest();
      res->result(latest ? http::status::ok : http::status::service_unavailable);
      res->set(http::field::content_type, "application/json");
      res->body() = latest ? *latest : error_json("no state yet");
    } else if (target == "/scenario") {
      res->result(http::status::ok);
      res->set(http::field::content_type, "application/json");
      res->body() = hub_.scenario_doc();
    } else {
      res->result(http::status::not_found);
      res->set(http::field::content_type, "application/json");
      res->body() = error_json("no such endpoint: " + target);
    }
    res->prepare_payload();
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code wec, std::size_t) {
                        if (wec || !res->keep_alive()) {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                          return;
                        }
                        self->read();
                      });
  }

  beast::tcp_stream stream_;
  Hub& hub_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

struct Service::Impl {
  Impl(Scenario sc, ServiceOptions opt)
      : scenario(std::move(sc)),
        options(std::move(opt)),
        hub(options.queue_depth, serialize_scenario(scenario, 2)),
        sim(scenario),
        acceptor(ioc) {
    if (options.decimation == 0) throw ConfigurationError("decimation must be at least 1");
    if (options.queue_depth == 0) throw ConfigurationError("queue depth must be at least 1");
    speed = options.realtime_factor > 0.0 ? options.realtime_factor
            : scenario.sim.realtime_factor > 0.0 ? scenario.sim.realtime_factor
                                                 : 1.0;
    // /state has a frame from the moment the port is open.
    publish(sim.evaluate());
  }

  void publish(const TraceRecord& rec) {
    hub.publish(std::make_shared<const std::string>(to_json(make_telemetry(rec, sim))));
  }

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(socket), hub)->run();
      accept();
    });
  }

  void simulate();

  Scenario scenario;
  ServiceOptions options;
  Hub hub;
  Simulator sim;  // owned by sim_thread once started
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::thread io_thread;
  std::thread sim_thread;
  std::atomic<bool> stopping{false};
  std::mutex state_mutex;
  std::condition_variable stopped_cv;
  bool stopped = false;
  bool stop_requested = false;
  bool started = false;
  double speed = 1.0;
};

void Service::Impl::simulate() {
  bool running = !options.start_paused;
  const double dt = scenario.sim.dt;
  const auto steps = static_cast<std::size_t>(std::llround(scenario.sim.duration / dt));
  Clock::time_point next = Clock::now();
  std::size_t idle_ticks = 0;
  while (!stopping.load()) {
    for (const ClientCommand& cmd : hub.drain_commands()) {
      if (cmd.kind == ClientCommand::Kind::kOperator) {
        sim.inject_operator(cmd.p);
        continue;
      }
      switch (cmd.action) {
        case ControlAction::kStart:
          running = true;
          break;
        case ControlAction::kPause:
          running = false;
          break;
        case ControlAction::kReset:
          sim.reset();
          publish(sim.evaluate());
          break;
        case ControlAction::kSetSpeed:
          speed = cmd.value;
          break;
      }
    }

    const bool advancing = running && sim.tick_count() < steps;
    if (advancing) {
      const TraceRecord rec = sim.evaluate();
      if (sim.tick_count() % options.decimation == 0) publish(rec);
      try {
        sim.tick();
      } catch (const std::exception& e) {
        std::cerr << "simulation aborted at t = " << format_double(sim.world().t) << " s: "
                  << e.what() << "\n";
        running = false;
      }
      idle_ticks = 0;
    } else if (++idle_ticks % options.decimation == 0) {
      // Paused or finished: keep the wire alive with the unchanged snapshot.
      publish(sim.evaluate());
    }

    next += std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(dt / speed));
    const Clock::time_point now = Clock::now();
    if (next < now - std::chrono::milliseconds(100)) next = now;  // do not burst after a stall
    std::this_thread::sleep_until(next);
  }
}

Service::Service(Scenario scenario, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), std::move(options))) {}

Service::~Service() { stop(); }

void Service::start() {
  Impl& s = *impl_;
  if (s.started) return;
  const tcp::endpoint endpoint(net::ip::make_address(s.options.address), s.options.port);
  s.acceptor.open(endpoint.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  s.acceptor.bind(endpoint);
  s.acceptor.listen(net::socket_base::max_listen_connections);
  s.started = true;
  s.accept();
  s.sim_thread = std::thread([&s] { s.simulate(); });
  s.io_thread = std::thread([&s] { s.ioc.run(); });
}

unsigned short Service::port() const { return impl_->acceptor.local_endpoint().port(); }

void Service::stop() {
  Impl& s = *impl_;
  if (!s.started) return;
  if (s.stopping.exchange(true)) return;
  net::post(s.ioc, [&s] {
    beast::error_code ignored;
    s.acceptor.close(ignored);
  });
  s.hub.close_all();
  s.ioc.stop();
  if (s.sim_thread.joinable()) s.sim_thread.join();
  if (s.io_thread.joinable()) s.io_thread.join();
  std::lock_guard lock(s.state_mutex);
  s.stopped = true;
  s.stopped_cv.notify_all();
}

void Service::wait() {
  Impl& s = *impl_;
  if (!s.started) return;
  net::signal_set signals(s.ioc, SIGINT, SIGTERM);
  signals.async_wait([&s](beast::error_code ec, int) {
    if (ec) return;
    std::lock_guard lock(s.state_mutex);
    s.stop_requested = true;
    s.stopped_cv.notify_all();
  });
  {
    std::unique_lock lock(s.state_mutex);
    s.stopped_cv.wait(lock, [&s] { return s.stopped || s.stop_requested; });
  }
  stop();
}

}  // namespace coopsafe
