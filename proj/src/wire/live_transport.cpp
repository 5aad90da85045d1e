#include "relaylab/wire/live_transport.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>
#include <system_error>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

namespace relaylab::wire {
namespace {

std::array<std::uint8_t, 4> le32(std::uint32_t v) {
  return {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
          static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
}

std::uint32_t from_le32(const std::array<std::uint8_t, 4>& b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

[[noreturn]] void throw_errno(const char* what) {
  throw std::system_error(errno, std::generic_category(), what);
}

}  // namespace

ByteStream::ByteStream(std::size_t capacity) : ring_(std::max<std::size_t>(capacity, 1)) {}

bool ByteStream::write(std::span<const std::uint8_t> bytes) {
  std::size_t done = 0;
  while (done < bytes.size()) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return closed_ || size_ < ring_.size(); });
    if (closed_) return false;
    const std::size_t tail = (head_ + size_) % ring_.size();
    const std::size_t n = std::min({bytes.size() - done, ring_.size() - size_, ring_.size() - tail});
    std::memcpy(ring_.data() + tail, bytes.data() + done, n);
    size_ += n;
    done += n;
    lock.unlock();
    not_empty_.notify_one();
  }
  return true;
}

std::size_t ByteStream::read(std::span<std::uint8_t> out) {
  if (out.empty()) return 0;
  std::unique_lock lock(mu_);
  not_empty_.wait(lock, [&] { return closed_ || size_ > 0; });
  if (size_ == 0) return 0;
  const std::size_t n = std::min({out.size(), size_, ring_.size() - head_});
  std::memcpy(out.data(), ring_.data() + head_, n);
  head_ = (head_ + n) % ring_.size();
  size_ -= n;
  lock.unlock();
  not_full_.notify_one();
  return n;
}

bool ByteStream::read_exact(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    const std::size_t n = read(out.subspan(done));
    if (n == 0) return false;
    done += n;
  }
  return true;
}

void ByteStream::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  not_full_.notify_all();
  not_empty_.notify_all();
}

bool send_frame(ByteStream& stream, std::span<const std::uint8_t> frame) {
  const auto len = le32(static_cast<std::uint32_t>(frame.size()));
  return stream.write(len) && stream.write(frame);
}

std::optional<std::vector<std::uint8_t>> receive_frame(ByteStream& stream) {
  std::array<std::uint8_t, 4> len{};
  if (!stream.read_exact(len)) return std::nullopt;
  std::vector<std::uint8_t> frame(from_le32(len));
  if (!stream.read_exact(frame)) return std::nullopt;
  return frame;
}

TcpStream::~TcpStream() {
  if (fd_ >= 0) ::close(fd_);
}

TcpStream& TcpStream::operator=(TcpStream&& o) noexcept {
  if (this != &o) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = o.fd_;
    o.fd_ = -1;
  }
  return *this;
}

TcpStream TcpStream::connect_loopback(std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw_errno("socket");
  TcpStream s(fd);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) throw_errno("connect");
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return s;
}

bool TcpStream::write_all(std::span<const std::uint8_t> bytes) {
  while (!bytes.empty()) {
    const ssize_t n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    bytes = bytes.subspan(static_cast<std::size_t>(n));
  }
  return true;
}

bool TcpStream::read_all(std::span<std::uint8_t> out) {
  while (!out.empty()) {
    const ssize_t n = ::recv(fd_, out.data(), out.size(), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    out = out.subspan(static_cast<std::size_t>(n));
  }
  return true;
}

bool TcpStream::send_frame(std::span<const std::uint8_t> frame) {
  const auto len = le32(static_cast<std::uint32_t>(frame.size()));
  return write_all(len) && write_all(frame);
}

std::optional<std::vector<std::uint8_t>> TcpStream::receive_frame() {
  std::array<std::uint8_t, 4> len{};
  if (!read_all(len)) return std::nullopt;
  std::vector<std::uint8_t> frame(from_le32(len));
  if (!read_all(frame)) return std::nullopt;
  return frame;
}

void TcpStream::shutdown_write() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

TcpListener::TcpListener() {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw_errno("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = 0;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd_);
    throw_errno("bind");
  }
  if (::listen(fd_, 1) != 0) {
    ::close(fd_);
    throw_errno("listen");
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

TcpStream TcpListener::accept() {
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw_errno("accept");
  return TcpStream(fd);
}

}  // namespace relaylab::wire
