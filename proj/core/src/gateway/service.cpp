#include "agentran/gateway/service.hpp"

#include <atomic>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <charconv>
#include <condition_variable>
#include <map>
#include <set>
#include <mutex>
#include <thread>

namespace agentran::gateway {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using datalake::RecordKind;

namespace {

constexpr std::size_t kMaxBody = 1 << 20;
constexpr std::size_t kMaxKpiWindow = 1024;

const char* event_type(RecordKind k) {
  switch (k) {
    case RecordKind::kMessage: return "a2a_message";
    case RecordKind::kDecision: return "decision";
    case RecordKind::kKpi: return "kpi";
    case RecordKind::kViolation: return "violation";
    case RecordKind::kLifecycle: return "lifecycle";
  }
  return "lifecycle";
}

struct Target {
  std::string path;
  std::map<std::string, std::string> query;
};

Target parse_target(std::string_view t) {
  Target out;
  const auto q = t.find('?');
  out.path = std::string(t.substr(0, q));
  if (q == std::string_view::npos) return out;
  std::string_view rest = t.substr(q + 1);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const auto pair = rest.substr(0, amp);
    const auto eq = pair.find('=');
    out.query[std::string(pair.substr(0, eq))] = eq == std::string_view::npos ? "" : std::string(pair.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
  return out;
}

std::optional<std::uint64_t> parse_uint(const std::string& s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Wakes event-stream sessions when the store gains a record.
struct Notifier {
  std::mutex mu;
  std::condition_variable cv;
  std::uint64_t latest = 0;
  void notify(std::uint64_t seq) {
    {
      std::lock_guard lock(mu);
      latest = std::max(latest, seq);
    }
    cv.notify_all();
  }
};

using Response = http::response<http::string_body>;

Response json_response(unsigned version, http::status status, const Json& body) {
  Response res{status, version};
  res.set(http::field::content_type, "application/json");
  res.set(http::field::server, "agentran");
  res.body() = body.dump();
  return res;
}

Response error_response(unsigned version, http::status status, const std::string& msg, const std::string& field = {}) {
  Json body{{"error", msg}};
  if (!field.empty()) body["field"] = field;
  return json_response(version, status, body);
}

}  // namespace

Json event_frame(const datalake::LogRecord& r) {
  Json j{{"type", event_type(r.kind)}, {"seq", r.seq}, {"timestamp", r.timestamp_s}, {"data", r.payload}};
  if (r.agent_id) j["source"] = *r.agent_id;
  return j;
}

ListenAddress parse_listen_address(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("listen address must be host:port, got " + s);
  ListenAddress a;
  if (colon > 0) a.host = s.substr(0, colon);
  const auto port = parse_uint(s.substr(colon + 1));
  if (!port || *port > 65535) throw std::invalid_argument("invalid port in " + s);
  a.port = static_cast<unsigned short>(*port);
  return a;
}

struct Service::Impl {
  Engine& engine;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  unsigned short port = 0;
  std::atomic<bool> stopping{false};
  std::shared_ptr<Notifier> notifier = std::make_shared<Notifier>();
  std::thread accept_thread;
  std::mutex conn_mu;
  std::vector<std::shared_ptr<tcp::socket>> sockets;
  std::vector<std::thread> workers;

  Impl(Engine& e, const ListenAddress& addr) : engine(e) {
    const tcp::endpoint ep{net::ip::make_address(addr.host), addr.port};
    acceptor.open(ep.protocol());
    acceptor.set_option(net::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
    port = acceptor.local_endpoint().port();
    engine.store().add_listener([n = notifier](const datalake::LogRecord& r) { n->notify(r.seq); });
    notifier->notify(engine.store().last_seq());
    accept_thread = std::thread([this] { accept_loop(); });
  }

  void accept_loop() {
    while (!stopping) {
      auto sock = std::make_shared<tcp::socket>(ioc);
      beast::error_code ec;
      acceptor.accept(*sock, ec);
      if (stopping) break;
      if (ec) continue;
      std::lock_guard lock(conn_mu);
      sockets.push_back(sock);
      workers.emplace_back([this, sock] { serve(sock); });
    }
  }

  void stop() {
    if (stopping.exchange(true)) return;
    {
      beast::error_code ec;
      tcp::socket poke(ioc);
      poke.connect({acceptor.local_endpoint().address(), port}, ec);
    }
    if (accept_thread.joinable()) accept_thread.join();
    notifier->cv.notify_all();
    std::vector<std::thread> ws;
    {
      std::lock_guard lock(conn_mu);
      for (auto& s : sockets) {
        beast::error_code ec;
        s->shutdown(tcp::socket::shutdown_both, ec);
      }
      ws.swap(workers);
    }
    for (auto& t : ws) t.join();
    beast::error_code ec;
    acceptor.close(ec);
  }

  void serve(const std::shared_ptr<tcp::socket>& sock) {
    beast::flat_buffer buf;
    for (;;) {
      beast::error_code ec;
      http::request_parser<http::string_body> parser;
      parser.body_limit(kMaxBody);
      http::read(*sock, buf, parser, ec);
      if (ec == http::error::end_of_stream || stopping) break;
      if (ec) {
        auto res = error_response(11, http::status::bad_request, "bad request: " + ec.message());
        res.keep_alive(false);
        res.prepare_payload();
        http::write(*sock, res, ec);
        break;
      }
      auto req = parser.release();
      if (websocket::is_upgrade(req)) {
        const auto t = parse_target(std::string_view(req.target().data(), req.target().size()));
        if (t.path == "/events") {
          stream_events(sock, std::move(req), t);
          return;
        }
        auto res = error_response(req.version(), http::status::not_found, "no WebSocket endpoint at " + t.path);
        res.keep_alive(false);
        res.prepare_payload();
        http::write(*sock, res, ec);
        break;
      }
      auto res = route(req);
      res.keep_alive(req.keep_alive());
      res.prepare_payload();
      http::write(*sock, res, ec);
      if (ec || !res.keep_alive()) break;
    }
    beast::error_code ec;
    sock->shutdown(tcp::socket::shutdown_send, ec);
  }

  Response route(const http::request<http::string_body>& req) {
    const auto t = parse_target(std::string_view(req.target().data(), req.target().size()));
    const auto v = req.version();
    auto only = [&](http::verb verb) -> std::optional<Response> {
      if (req.method() == verb) return std::nullopt;
      auto res = error_response(v, http::status::method_not_allowed, "method not allowed on " + t.path);
      res.set(http::field::allow, std::string(http::to_string(verb)));
      return res;
    };
    if (t.path == "/intents") {
      if (auto r = only(http::verb::post)) return *r;
      return post_intent(req);
    }
    if (t.path == "/kpis") {
      if (auto r = only(http::verb::get)) return *r;
      std::size_t n = 1;
      if (auto it = t.query.find("window"); it != t.query.end()) {
        const auto w = parse_uint(it->second);
        if (!w || *w < 1 || *w > kMaxKpiWindow)
          return error_response(v, http::status::bad_request, "window must be an integer in [1, 1024]", "window");
        n = *w;
      }
      return json_response(v, http::status::ok, Json{{"snapshots", engine.latest_kpis(n)}});
    }
    if (t.path == "/agents") {
      if (auto r = only(http::verb::get)) return *r;
      return json_response(v, http::status::ok,
                           Json{{"agents", engine.agents_snapshot()}, {"virtual_time_s", engine.now()}});
    }
    if (t.path == "/records") {
      if (auto r = only(http::verb::get)) return *r;
      std::uint64_t since = 0;
      if (auto it = t.query.find("since_seq"); it != t.query.end()) {
        const auto s = parse_uint(it->second);
        if (!s) return error_response(v, http::status::bad_request, "since_seq must be an integer", "since_seq");
        since = *s;
      }
      Json frames = Json::array();
      for (const auto& r : engine.store().records_since(since)) frames.push_back(event_frame(r));
      return json_response(v, http::status::ok, Json{{"records", frames}, {"last_seq", engine.store().last_seq()}});
    }
    if (t.path == "/status") {
      if (auto r = only(http::verb::get)) return *r;
      return json_response(v, http::status::ok,
                           Json{{"scenario", engine.config().name},
                                {"virtual_time_s", engine.now()},
                                {"last_seq", engine.store().last_seq()}});
    }
    return error_response(v, http::status::not_found, "no route for " + t.path);
  }

  Response post_intent(const http::request<http::string_body>& req) {
    const auto v = req.version();
    Json body;
    try {
      body = Json::parse(req.body());
    } catch (const Json::exception& e) {
      return error_response(v, http::status::bad_request, std::string("malformed JSON: ") + e.what(), "body");
    }
    if (!body.is_object()) return error_response(v, http::status::bad_request, "intent must be an object", "body");
    static const std::set<std::string> kAllowed = {"intent_id", "body_text", "requirements", "domain", "issuer"};
    for (const auto& [key, _] : body.items())
      if (!kAllowed.count(key)) return error_response(v, http::status::bad_request, "unknown member " + key, key);
    model::Intent intent;
    try {
      if (!body.contains("body_text") || !body["body_text"].is_string())
        throw model::IntentError("body_text", "must be a string");
      intent.body_text = body["body_text"].get<std::string>();
      if (body.contains("intent_id")) {
        if (!body["intent_id"].is_string()) throw model::IntentError("intent_id", "must be a string");
        intent.intent_id = body["intent_id"].get<std::string>();
      }
      if (body.contains("domain")) {
        if (!body["domain"].is_string()) throw model::IntentError("domain", "must be a string");
        intent.domain = body["domain"].get<std::string>();
      }
      if (body.contains("requirements")) {
        if (!body["requirements"].is_array()) throw model::IntentError("requirements", "must be an array");
        for (std::size_t i = 0; i < body["requirements"].size(); ++i) {
          try {
            intent.requirements.push_back(body["requirements"][i].get<model::SliceRequirement>());
          } catch (const model::IntentError& e) {
            throw model::IntentError("requirements[" + std::to_string(i) + "]." + e.field(), e.what());
          } catch (const std::exception& e) {
            throw model::IntentError("requirements[" + std::to_string(i) + "]", e.what());
          }
        }
      }
      const std::string id = engine.submit_intent(std::move(intent));
      return json_response(v, http::status::accepted, Json{{"intent_id", id}, {"status", "queued"}});
    } catch (const model::IntentError& e) {
      return error_response(v, http::status::bad_request, e.what(), e.field());
    }
  }

  void stream_events(const std::shared_ptr<tcp::socket>& sock, http::request<http::string_body> req,
                     const Target& t) {
    std::uint64_t last = 0;
    if (auto it = t.query.find("since_seq"); it != t.query.end())
      if (auto s = parse_uint(it->second)) last = *s;
    websocket::stream<tcp::socket&> ws(*sock);
    beast::error_code ec;
    ws.accept(req, ec);
    if (ec) return;
    ws.text(true);
    while (!stopping) {
      for (const auto& r : engine.store().records_since(last)) {
        ws.write(net::buffer(event_frame(r).dump()), ec);
        if (ec) return;
        last = r.seq;
      }
      // Clients only send control frames; reading answers their close handshake.
      if (sock->available(ec) > 0) {
        beast::flat_buffer in;
        ws.read(in, ec);
        if (ec) return;
      }
      std::unique_lock lock(notifier->mu);
      notifier->cv.wait_for(lock, std::chrono::milliseconds(250),
                            [&] { return stopping.load() || notifier->latest > last; });
    }
    ws.close(websocket::close_code::going_away, ec);
  }
};

Service::Service(Engine& engine, const ListenAddress& addr) : impl_(std::make_unique<Impl>(engine, addr)) {}
Service::~Service() { stop(); }
unsigned short Service::port() const { return impl_->port; }
void Service::stop() {
  if (impl_) impl_->stop();
}

}  // namespace agentran::gateway
