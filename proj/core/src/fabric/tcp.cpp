#include "agentran/fabric/tcp.hpp"

#include <array>
#include <list>

#include <boost/asio.hpp>

#include "agentran/fabric/framing.hpp"

namespace agentran::fabric {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

namespace {

void write_all(tcp::socket& s, const std::string& bytes) { asio::write(s, asio::buffer(bytes)); }

// Blocks until one frame is available; nullopt on orderly EOF.
std::optional<std::string> read_frame(tcp::socket& s, FrameDecoder& dec) {
  std::array<char, 4096> chunk{};
  for (;;) {
    if (auto f = dec.next()) return f;
    boost::system::error_code ec;
    const std::size_t n = s.read_some(asio::buffer(chunk), ec);
    if (ec == asio::error::eof || ec == asio::error::connection_reset || ec == asio::error::operation_aborted ||
        ec == asio::error::bad_descriptor)
      return std::nullopt;
    if (ec) throw boost::system::system_error(ec);
    dec.feed(std::string_view(chunk.data(), n));
  }
}

}  // namespace

struct TcpRpcHost::Impl {
  asio::io_context io;
  tcp::acceptor acceptor{io};
  FrameHandler handler;
  std::thread accept_thread;
  std::mutex mu;
  std::list<std::shared_ptr<tcp::socket>> sockets;
  std::list<std::thread> workers;
  std::atomic<bool> stopping{false};

  void serve(std::shared_ptr<tcp::socket> sock) {
    FrameDecoder dec;
    try {
      while (!stopping) {
        auto frame = read_frame(*sock, dec);
        if (!frame) break;
        if (auto reply = handler(*frame)) write_all(*sock, encode_frame(*reply));
      }
    } catch (const std::exception&) {
      // Connection-level failure (bad framing, reset): drop the connection.
    }
    boost::system::error_code ignored;
    sock->close(ignored);
  }

  void accept_loop() {
    while (!stopping) {
      auto sock = std::make_shared<tcp::socket>(io);
      boost::system::error_code ec;
      acceptor.accept(*sock, ec);
      if (ec || stopping) break;
      std::lock_guard lock(mu);
      sockets.push_back(sock);
      workers.emplace_back([this, sock] { serve(sock); });
    }
  }
};

TcpRpcHost::TcpRpcHost(FrameHandler handler, const std::string& host, unsigned short port)
    : impl_(std::make_unique<Impl>()) {
  impl_->handler = std::move(handler);
  const tcp::endpoint ep(asio::ip::make_address(host), port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
  port_ = impl_->acceptor.local_endpoint().port();
  impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
}

TcpRpcHost::~TcpRpcHost() { stop(); }

void TcpRpcHost::stop() {
  if (!impl_ || impl_->stopping.exchange(true)) return;
  boost::system::error_code ignored;
  // Closing a blocked acceptor is not reliable on every platform; poke it.
  try {
    tcp::socket poke(impl_->io);
    poke.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port_), ignored);
  } catch (...) {
  }
  impl_->acceptor.close(ignored);
  if (impl_->accept_thread.joinable()) impl_->accept_thread.join();
  std::list<std::thread> workers;
  {
    std::lock_guard lock(impl_->mu);
    for (auto& s : impl_->sockets) {
      s->shutdown(tcp::socket::shutdown_both, ignored);
      s->close(ignored);
    }
    workers.swap(impl_->workers);
  }
  for (auto& w : workers)
    if (w.joinable()) w.join();
}

struct TcpTransport::Impl {
  asio::io_context io;
  tcp::socket sock{io};
  FrameDecoder dec;
  std::mutex mu;
};

TcpTransport::TcpTransport(const std::string& host, unsigned short port) : impl_(std::make_unique<Impl>()) {
  tcp::resolver resolver(impl_->io);
  asio::connect(impl_->sock, resolver.resolve(host, std::to_string(port)));
  impl_->sock.set_option(tcp::no_delay(true));
}

TcpTransport::~TcpTransport() {
  boost::system::error_code ignored;
  impl_->sock.shutdown(tcp::socket::shutdown_both, ignored);
  impl_->sock.close(ignored);
}

std::string TcpTransport::roundtrip(const std::string& frame) {
  std::lock_guard lock(impl_->mu);
  write_all(impl_->sock, encode_frame(frame));
  auto reply = read_frame(impl_->sock, impl_->dec);
  if (!reply) throw std::runtime_error("connection closed before reply");
  return *reply;
}

void TcpTransport::send_only(const std::string& frame) {
  std::lock_guard lock(impl_->mu);
  write_all(impl_->sock, encode_frame(frame));
}

}  // namespace agentran::fabric
