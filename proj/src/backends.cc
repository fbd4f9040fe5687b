// Copyright 2026 The ecx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "ecx/errors.h"
#include "ecx/prompt.h"

namespace ecx {

namespace {

using Clock = std::chrono::steady_clock;

class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  int fd() const { return fd_; }

 private:
  int fd_;
};

int RemainingMs(Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  return left.count() > 0 ? static_cast<int>(left.count()) : 0;
}

// Waits for `events` on fd; throws BackendError on timeout.
void WaitFor(int fd, short events, Clock::time_point deadline,
             const std::string& what) {
  for (;;) {
    pollfd p{fd, events, 0};
    const int rc = ::poll(&p, 1, RemainingMs(deadline));
    if (rc > 0) return;
    if (rc == 0) throw BackendError("timed out while " + what);
    if (errno != EINTR) {
      throw BackendError("poll failed while " + what + ": " +
                         std::strerror(errno));
    }
  }
}

}  // namespace

WireBackend::WireBackend(std::string endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size()) {
    throw InputError("wire endpoint must be host:port, got '" + endpoint + "'");
  }
  host_ = endpoint.substr(0, colon);
  port_ = endpoint.substr(colon + 1);
}

std::string WireBackend::Generate(const RenderedPrompt& prompt,
                                  std::chrono::milliseconds timeout) const {
  const auto deadline = Clock::now() + timeout;
  const std::string target = host_ + ":" + port_;

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (int rc = ::getaddrinfo(host_.c_str(), port_.c_str(), &hints, &found)) {
    throw BackendError("cannot resolve " + target + ": " + ::gai_strerror(rc));
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> addrs(found,
                                                            &::freeaddrinfo);

  Socket sock(::socket(addrs->ai_family, addrs->ai_socktype | SOCK_NONBLOCK,
                       addrs->ai_protocol));
  if (sock.fd() < 0) {
    throw BackendError(std::string("socket failed: ") + std::strerror(errno));
  }
  if (::connect(sock.fd(), addrs->ai_addr, addrs->ai_addrlen) != 0) {
    if (errno != EINPROGRESS) {
      throw BackendError("cannot connect to " + target + ": " +
                         std::strerror(errno));
    }
    WaitFor(sock.fd(), POLLOUT, deadline, "connecting to " + target);
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(sock.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      throw BackendError("cannot connect to " + target + ": " +
                         std::strerror(err));
    }
  }

  const std::string request = EncodeWireRequest(prompt);
  std::size_t sent = 0;
  while (sent < request.size()) {
    WaitFor(sock.fd(), POLLOUT, deadline, "sending to " + target);
    const ssize_t n = ::send(sock.fd(), request.data() + sent,
                             request.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EAGAIN || errno == EINTR) continue;
      throw BackendError("send to " + target + " failed: " +
                         std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }

  std::string reply;
  char buf[4096];
  for (;;) {
    const auto newline = reply.find('\n');
    if (newline != std::string::npos) {
      reply.resize(newline);
      break;
    }
    WaitFor(sock.fd(), POLLIN, deadline, "reading from " + target);
    const ssize_t n = ::recv(sock.fd(), buf, sizeof(buf), 0);
    if (n < 0) {
      if (errno == EAGAIN || errno == EINTR) continue;
      throw BackendError("read from " + target + " failed: " +
                         std::strerror(errno), reply);
    }
    if (n == 0) {
      if (reply.empty()) {
        throw BackendError(target + " closed the connection without a reply");
      }
      break;
    }
    reply.append(buf, static_cast<std::size_t>(n));
  }
  return DecodeWireResponse(reply);
}

std::unique_ptr<GenerationBackend> MakeBackend(std::string_view name,
                                               const BackendOptions& options) {
  if (name == "echo") return std::make_unique<EchoBackend>();
  if (name == "canned") return std::make_unique<CannedBackend>(options.canned_reply);
  if (name == "fault") return std::make_unique<FaultBackend>();
  if (name == "wire") return std::make_unique<WireBackend>(options.endpoint);
  throw InputError("unknown generation backend '" + std::string(name) + "'");
}

}  // namespace ecx
