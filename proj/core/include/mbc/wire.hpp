#pragma once

// Frame protocol and the sender/receiver session.
//
// Frame: u32 BE payload length | 1-byte type | payload
//
//   HELLO      version byte, 32-byte grammar fingerprint
//   HELLO_ACK  empty
//   DATA       u64 BE sequence number, SPE1 bytes
//   DATA_ACK   u64 BE sequence number
//   ERR        code byte, UTF-8 message
//
// Sequence numbers start at 0. The sender closes the channel after the last
// DATA_ACK; a clean end of stream at a frame boundary ends the session.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mbc/grammar.hpp"

namespace mbc::wire {

inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 5;
inline constexpr std::uint32_t kMaxPayload = 1u << 28;

enum class FrameType : std::uint8_t { kHello = 1, kHelloAck = 2, kData = 3, kDataAck = 4, kErr = 5 };

enum class ErrCode : std::uint8_t {
  kFingerprintMismatch = 1,
  kProtocolViolation = 2,
  kUndecodable = 3,
  kUnsupportedVersion = 4,
};

struct Frame {
  FrameType type = FrameType::kErr;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

Frame hello(const Digest& fingerprint, std::uint8_t version = kProtocolVersion);
Frame hello_ack();
Frame data(std::uint64_t seq, std::vector<std::uint8_t> encoding);
Frame data_ack(std::uint64_t seq);
Frame err(ErrCode code, std::string_view message);

std::vector<std::uint8_t> encode_frame(const Frame& frame);

// Incremental parser. Errors name the byte offset of the offending frame.
class FrameParser {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  /// Next complete frame, if any. Throws kProtocolViolation on an unknown type
  /// or oversized length.
  std::optional<Frame> next();
  /// True when no partial frame is buffered.
  bool at_boundary() const { return buffer_.size() == start_; }
  std::uint64_t offset() const { return consumed_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t start_ = 0;
  std::uint64_t consumed_ = 0;
};

/// Whole-buffer parse. A partial trailing frame is a kTruncatedStream error.
std::vector<Frame> parse_frames(std::span<const std::uint8_t> bytes);

// A reliable ordered byte stream.
class Channel {
 public:
  virtual ~Channel() = default;
  /// Throws kChannelClosed when the peer is gone.
  virtual void write(std::span<const std::uint8_t> bytes) = 0;
  /// Blocks for at least one byte; returns 0 at end of stream.
  virtual std::size_t read(std::span<std::uint8_t> out) = 0;
  /// Ends this side's output; the peer sees end of stream once it has drained.
  virtual void close() = 0;

  std::uint64_t bytes_written() const { return bytes_written_; }
  std::uint64_t bytes_read() const { return bytes_read_; }

 protected:
  std::uint64_t bytes_written_ = 0;
  std::uint64_t bytes_read_ = 0;
};

/// Two connected in-memory endpoints.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_pipe();

/// `host` may be a name or a numeric address. Throws kIo.
std::unique_ptr<Channel> connect_tcp(const std::string& host, std::uint16_t port);

class TcpListener {
 public:
  /// Port 0 picks an ephemeral port; see port().
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<Channel> accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Splits "HOST:PORT". Throws kSyntaxError.
std::pair<std::string, std::uint16_t> parse_endpoint(std::string_view text);

struct SessionReport {
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::vector<std::size_t> encoding_bytes;  // SPE1 size per message
  std::vector<Bits> encoding_bits;          // bit_length per message
};

/// Throws kFingerprintMismatch or kProtocolViolation when the receiver
/// answers with ERR, kChannelClosed when the stream ends early.
SessionReport run_sender(Channel& channel, const Grammar& grammar,
                         const std::vector<Message>& messages);

struct ReceiveResult {
  std::vector<Message> messages;
  SessionReport report;
};

/// On a fingerprint mismatch sends ERR 1, closes the channel and throws
/// kFingerprintMismatch. Frames out of order get ERR 2 and kProtocolViolation.
ReceiveResult run_receiver(Channel& channel, const Grammar& grammar);

}  // namespace mbc::wire
