#pragma once

#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

namespace relaylab::wire {

/// Bounded single-producer single-consumer byte stream. write() blocks while
/// the buffer is full (backpressure), read() blocks until data arrives or the
/// stream is closed.
class ByteStream {
 public:
  explicit ByteStream(std::size_t capacity);

  ByteStream(const ByteStream&) = delete;
  ByteStream& operator=(const ByteStream&) = delete;

  /// Returns false if the stream was closed before all bytes were written.
  bool write(std::span<const std::uint8_t> bytes);
  /// Reads up to out.size() bytes; returns 0 only at end of stream.
  std::size_t read(std::span<std::uint8_t> out);
  /// Reads exactly out.size() bytes unless the stream ends first.
  bool read_exact(std::span<std::uint8_t> out);
  void close();

  std::size_t capacity() const { return ring_.size(); }

 private:
  std::vector<std::uint8_t> ring_;
  std::size_t head_ = 0;  // next read position
  std::size_t size_ = 0;
  bool closed_ = false;
  std::mutex mu_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
};

/// Length-prefixed (u32 little-endian) frame transfer over a ByteStream.
bool send_frame(ByteStream& stream, std::span<const std::uint8_t> frame);
std::optional<std::vector<std::uint8_t>> receive_frame(ByteStream& stream);

/// Owning wrapper for a connected TCP socket.
class TcpStream {
 public:
  TcpStream() = default;
  explicit TcpStream(int fd) : fd_(fd) {}
  ~TcpStream();
  TcpStream(TcpStream&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  TcpStream& operator=(TcpStream&& o) noexcept;
  TcpStream(const TcpStream&) = delete;
  TcpStream& operator=(const TcpStream&) = delete;

  /// Connects to 127.0.0.1:port. Throws std::system_error on failure.
  static TcpStream connect_loopback(std::uint16_t port);

  bool send_frame(std::span<const std::uint8_t> frame);
  std::optional<std::vector<std::uint8_t>> receive_frame();
  void shutdown_write();
  bool valid() const { return fd_ >= 0; }

 private:
  bool write_all(std::span<const std::uint8_t> bytes);
  bool read_all(std::span<std::uint8_t> out);

  int fd_ = -1;
};

/// Listening socket bound to 127.0.0.1 on an ephemeral port.
class TcpListener {
 public:
  TcpListener();
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  TcpStream accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace relaylab::wire
