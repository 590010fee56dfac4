#include "mbc/wire.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

#include "mbc/bit_io.hpp"
#include "mbc/codec.hpp"
#include "mbc/encoding_format.hpp"
#include "mbc/error.hpp"

namespace mbc::wire {

Frame hello(const Digest& fingerprint, std::uint8_t version) {
  Frame f{FrameType::kHello, {version}};
  f.payload.insert(f.payload.end(), fingerprint.begin(), fingerprint.end());
  return f;
}

Frame hello_ack() { return {FrameType::kHelloAck, {}}; }

Frame data(std::uint64_t seq, std::vector<std::uint8_t> encoding) {
  Frame f{FrameType::kData, {}};
  f.payload.reserve(8 + encoding.size());
  put_u64_be(f.payload, seq);
  f.payload.insert(f.payload.end(), encoding.begin(), encoding.end());
  return f;
}

Frame data_ack(std::uint64_t seq) {
  Frame f{FrameType::kDataAck, {}};
  put_u64_be(f.payload, seq);
  return f;
}

Frame err(ErrCode code, std::string_view message) {
  Frame f{FrameType::kErr, {static_cast<std::uint8_t>(code)}};
  f.payload.insert(f.payload.end(), message.begin(), message.end());
  return f;
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  if (frame.payload.size() > kMaxPayload)
    throw Error(ErrorCode::kProtocolViolation, "payload too large");
  const auto n = static_cast<std::uint32_t>(frame.payload.size());
  std::vector<std::uint8_t> out{static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16),
                                static_cast<std::uint8_t>(n >> 8), static_cast<std::uint8_t>(n),
                                static_cast<std::uint8_t>(frame.type)};
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

void FrameParser::feed(std::span<const std::uint8_t> bytes) {
  if (start_ > 0 && start_ == buffer_.size()) {
    buffer_.clear();
    start_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameParser::next() {
  const std::size_t avail = buffer_.size() - start_;
  if (avail < kFrameHeaderBytes) return std::nullopt;
  const std::uint8_t* p = buffer_.data() + start_;
  const std::uint32_t n = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
                          (std::uint32_t{p[2]} << 8) | p[3];
  const std::uint8_t type = p[4];
  if (type < 1 || type > 5)
    throw Error(ErrorCode::kProtocolViolation,
                "unknown frame type " + std::to_string(type) + " at offset " + std::to_string(consumed_));
  if (n > kMaxPayload)
    throw Error(ErrorCode::kProtocolViolation,
                "payload length " + std::to_string(n) + " at offset " + std::to_string(consumed_));
  if (avail < kFrameHeaderBytes + n) return std::nullopt;
  Frame f{static_cast<FrameType>(type), {p + kFrameHeaderBytes, p + kFrameHeaderBytes + n}};
  start_ += kFrameHeaderBytes + n;
  consumed_ += kFrameHeaderBytes + n;
  if (start_ > (std::size_t{1} << 16) && start_ * 2 > buffer_.size()) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(start_));
    start_ = 0;
  }
  return f;
}

std::vector<Frame> parse_frames(std::span<const std::uint8_t> bytes) {
  FrameParser parser;
  parser.feed(bytes);
  std::vector<Frame> out;
  while (auto f = parser.next()) out.push_back(std::move(*f));
  if (!parser.at_boundary())
    throw Error(ErrorCode::kTruncatedStream,
                "partial frame at offset " + std::to_string(parser.offset()));
  return out;
}

// --- in-memory pipe --------------------------------------------------------

namespace {

struct Direction {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> bytes;
  bool writer_closed = false;
  bool reader_closed = false;
};

class PipeEnd final : public Channel {
 public:
  PipeEnd(std::shared_ptr<Direction> in, std::shared_ptr<Direction> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~PipeEnd() override { close(); }

  void write(std::span<const std::uint8_t> bytes) override {
    std::lock_guard lock(out_->mu);
    if (out_->writer_closed || out_->reader_closed)
      throw Error(ErrorCode::kChannelClosed, "pipe closed");
    out_->bytes.insert(out_->bytes.end(), bytes.begin(), bytes.end());
    bytes_written_ += bytes.size();
    out_->cv.notify_all();
  }

  std::size_t read(std::span<std::uint8_t> dst) override {
    std::unique_lock lock(in_->mu);
    in_->cv.wait(lock, [&] { return !in_->bytes.empty() || in_->writer_closed || in_->reader_closed; });
    const std::size_t n = std::min(dst.size(), in_->bytes.size());
    std::copy_n(in_->bytes.begin(), n, dst.begin());
    in_->bytes.erase(in_->bytes.begin(), in_->bytes.begin() + static_cast<std::ptrdiff_t>(n));
    bytes_read_ += n;
    return n;
  }

  void close() override {
    {
      std::lock_guard lock(out_->mu);
      out_->writer_closed = true;
      out_->cv.notify_all();
    }
    std::lock_guard lock(in_->mu);
    in_->reader_closed = true;
    in_->cv.notify_all();
  }

 private:
  std::shared_ptr<Direction> in_;
  std::shared_ptr<Direction> out_;
};

// --- TCP -------------------------------------------------------------------

class TcpChannel final : public Channel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {}
  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void write(std::span<const std::uint8_t> bytes) override {
    std::size_t done = 0;
    while (done < bytes.size()) {
      const auto n = ::send(fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::kChannelClosed, std::strerror(errno));
      }
      done += static_cast<std::size_t>(n);
      bytes_written_ += static_cast<std::size_t>(n);
    }
  }

  std::size_t read(std::span<std::uint8_t> dst) override {
    for (;;) {
      const auto n = ::recv(fd_, dst.data(), dst.size(), 0);
      if (n >= 0) {
        bytes_read_ += static_cast<std::size_t>(n);
        return static_cast<std::size_t>(n);
      }
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) return 0;
      throw Error(ErrorCode::kIo, std::strerror(errno));
    }
  }

  void close() override { ::shutdown(fd_, SHUT_WR); }

 private:
  int fd_;
};

struct AddrInfo {
  addrinfo* list = nullptr;
  ~AddrInfo() {
    if (list) freeaddrinfo(list);
  }
};

AddrInfo resolve(const std::string& host, std::uint16_t port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  AddrInfo out;
  const auto service = std::to_string(port);
  const int rc = getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &out.list);
  if (rc != 0) throw Error(ErrorCode::kIo, host + ": " + gai_strerror(rc));
  return out;
}

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_pipe() {
  auto a_to_b = std::make_shared<Direction>();
  auto b_to_a = std::make_shared<Direction>();
  return {std::make_unique<PipeEnd>(b_to_a, a_to_b), std::make_unique<PipeEnd>(a_to_b, b_to_a)};
}

std::unique_ptr<Channel> connect_tcp(const std::string& host, std::uint16_t port) {
  const auto addrs = resolve(host, port, false);
  int last_errno = 0;
  for (auto* a = addrs.list; a; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) {
      last_errno = errno;
      continue;
    }
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) return std::make_unique<TcpChannel>(fd);
    last_errno = errno;
    ::close(fd);
  }
  throw Error(ErrorCode::kIo, "connect " + host + ":" + std::to_string(port) + ": " +
                                  std::strerror(last_errno));
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  const auto addrs = resolve(host, port, true);
  int last_errno = 0;
  for (auto* a = addrs.list; a; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) {
      last_errno = errno;
      continue;
    }
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 8) == 0) {
      fd_ = fd;
      break;
    }
    last_errno = errno;
    ::close(fd);
  }
  if (fd_ < 0)
    throw Error(ErrorCode::kIo, "listen " + host + ":" + std::to_string(port) + ": " +
                                    std::strerror(last_errno));
  sockaddr_storage addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  if (addr.ss_family == AF_INET)
    port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  else
    port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Channel> TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<TcpChannel>(fd);
    if (errno != EINTR) throw Error(ErrorCode::kIo, std::string("accept: ") + std::strerror(errno));
  }
}

std::pair<std::string, std::uint16_t> parse_endpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos)
    throw Error(ErrorCode::kSyntaxError, "expected HOST:PORT, got '" + std::string(text) + "'");
  std::string host(text.substr(0, colon));
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  const auto port_text = text.substr(colon + 1);
  unsigned port = 0;
  const auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || end != port_text.data() + port_text.size() || port > 65535)
    throw Error(ErrorCode::kSyntaxError, "bad port '" + std::string(port_text) + "'");
  return {host, static_cast<std::uint16_t>(port)};
}

// --- session ---------------------------------------------------------------

namespace {

class Session {
 public:
  explicit Session(Channel& channel) : channel_(channel) {}

  void send(const Frame& frame) {
    channel_.write(encode_frame(frame));
    ++report.frames_sent;
    report.bytes_sent = channel_.bytes_written();
  }

  /// nullopt at a clean end of stream.
  std::optional<Frame> receive() {
    std::uint8_t buf[4096];
    for (;;) {
      if (auto f = parser_.next()) {
        ++report.frames_received;
        return f;
      }
      const auto n = channel_.read(buf);
      report.bytes_received = channel_.bytes_read();
      if (n == 0) {
        if (!parser_.at_boundary())
          throw Error(ErrorCode::kChannelClosed,
                      "stream ended inside a frame at offset " + std::to_string(parser_.offset()));
        return std::nullopt;
      }
      parser_.feed(std::span<const std::uint8_t>(buf, n));
    }
  }

  Frame expect() {
    auto f = receive();
    if (!f) throw Error(ErrorCode::kChannelClosed, "peer closed the session");
    return std::move(*f);
  }

  [[noreturn]] void fail(ErrCode code, ErrorCode error, const std::string& message) {
    try {
      send(err(code, message));
    } catch (const Error&) {
      // the peer may already be gone; the local error is what matters
    }
    channel_.close();
    throw Error(error, message);
  }

  SessionReport report;

 private:
  Channel& channel_;
  FrameParser parser_;
};

[[noreturn]] void raise_peer_error(const Frame& f) {
  const std::string text(f.payload.begin() + (f.payload.empty() ? 0 : 1), f.payload.end());
  const int code = f.payload.empty() ? 0 : f.payload[0];
  const auto error = code == static_cast<int>(ErrCode::kFingerprintMismatch) ? ErrorCode::kFingerprintMismatch
                                                                             : ErrorCode::kProtocolViolation;
  throw Error(error, "peer sent ERR " + std::to_string(code) + ": " + text);
}

std::uint64_t read_seq(const Frame& f) { return get_u64_be(std::span(f.payload).first(8)); }

}  // namespace

SessionReport run_sender(Channel& channel, const Grammar& grammar, const std::vector<Message>& messages) {
  Session s(channel);
  s.send(hello(grammar.fingerprint()));
  Frame reply = s.expect();
  if (reply.type == FrameType::kErr) raise_peer_error(reply);
  if (reply.type != FrameType::kHelloAck || !reply.payload.empty())
    s.fail(ErrCode::kProtocolViolation, ErrorCode::kProtocolViolation, "expected HELLO_ACK");

  for (std::size_t seq = 0; seq < messages.size(); ++seq) {
    const Encoding e = encode(messages[seq], grammar);
    auto bytes = write_encoding(e, grammar);
    s.report.encoding_bytes.push_back(bytes.size());
    s.report.encoding_bits.push_back(e.bit_length);
    s.send(data(seq, std::move(bytes)));
    Frame ack = s.expect();
    if (ack.type == FrameType::kErr) raise_peer_error(ack);
    if (ack.type != FrameType::kDataAck || ack.payload.size() != 8 || read_seq(ack) != seq)
      s.fail(ErrCode::kProtocolViolation, ErrorCode::kProtocolViolation,
             "expected DATA_ACK " + std::to_string(seq));
  }
  channel.close();
  // Drain until the receiver closes so both sides agree the session ended.
  while (auto extra = s.receive()) {
    if (extra->type == FrameType::kErr) raise_peer_error(*extra);
    throw Error(ErrorCode::kProtocolViolation, "unexpected frame after the last DATA_ACK");
  }
  return s.report;
}

ReceiveResult run_receiver(Channel& channel, const Grammar& grammar) {
  Session s(channel);
  ReceiveResult result;
  Frame first = [&] {
    try {
      return s.expect();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kProtocolViolation)
        s.fail(ErrCode::kProtocolViolation, ErrorCode::kProtocolViolation, e.what());
      throw;
    }
  }();
  if (first.type != FrameType::kHello)
    s.fail(ErrCode::kProtocolViolation, ErrorCode::kProtocolViolation, "expected HELLO");
  if (first.payload.size() != 1 + 32)
    s.fail(ErrCode::kProtocolViolation, ErrorCode::kProtocolViolation, "malformed HELLO");
  if (first.payload[0] != kProtocolVersion)
    s.fail(ErrCode::kUnsupportedVersion, ErrorCode::kProtocolViolation,
           "unsupported protocol version " + std::to_string(first.payload[0]));
  if (!std::equal(grammar.fingerprint().begin(), grammar.fingerprint().end(), first.payload.begin() + 1))
    s.fail(ErrCode::kFingerprintMismatch, ErrorCode::kFingerprintMismatch,
           "sender grammar differs from " + to_hex(grammar.fingerprint()));
  s.send(hello_ack());

  for (std::uint64_t expected = 0;; ++expected) {
    std::optional<Frame> f;
    try {
      f = s.receive();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kProtocolViolation)
        s.fail(ErrCode::kProtocolViolation, ErrorCode::kProtocolViolation, e.what());
      throw;
    }
    if (!f) break;
    if (f->type != FrameType::kData || f->payload.size() < 8)
      s.fail(ErrCode::kProtocolViolation, ErrorCode::kProtocolViolation, "expected DATA");
    if (read_seq(*f) != expected)
      s.fail(ErrCode::kProtocolViolation, ErrorCode::kProtocolViolation,
             "DATA " + std::to_string(read_seq(*f)) + " out of order, expected " + std::to_string(expected));
    const auto body = std::span<const std::uint8_t>(f->payload).subspan(8);
    Message m;
    try {
      const Encoding e = read_encoding(body, grammar);
      m = decode(e, grammar);
      s.report.encoding_bits.push_back(e.bit_length);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kFingerprintMismatch)
        s.fail(ErrCode::kFingerprintMismatch, ErrorCode::kFingerprintMismatch, e.what());
      s.fail(ErrCode::kUndecodable, ErrorCode::kProtocolViolation, e.what());
    }
    s.report.encoding_bytes.push_back(body.size());
    result.messages.push_back(std::move(m));
    s.send(data_ack(expected));
  }
  channel.close();
  result.report = s.report;
  return result;
}

}  // namespace mbc::wire
