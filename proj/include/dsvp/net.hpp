#pragma once

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "wire.hpp"

namespace dsvp::net {

struct Endpoint {
    std::string host;
    uint16_t port = 0;

    std::string str() const { return host + ":" + std::to_string(port); }

    static Endpoint parse(const std::string &s) {
        auto colon = s.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
            fail(Errc::config, "endpoint must be host:port, got '" + s + "'");
        Endpoint e;
        e.host = s.substr(0, colon);
        try {
            unsigned long p = std::stoul(s.substr(colon + 1));
            if (p > 65535) throw std::out_of_range("port");
            e.port = static_cast<uint16_t>(p);
        } catch (const std::exception &) {
            fail(Errc::config, "bad port in endpoint '" + s + "'");
        }
        return e;
    }
};

// Raised when establishing a connection fails; `refused` distinguishes an
// active refusal from timeouts and lookup errors.
class ConnectError : public SvpError {
public:
    ConnectError(const std::string &what, bool refused)
        : SvpError(Errc::io, what), refused_(refused) {}
    bool refused() const noexcept { return refused_; }

private:
    bool refused_;
};

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket &&o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket &operator=(Socket &&o) noexcept {
        if (this != &o) {
            close();
            fd_ = o.fd_;
            o.fd_ = -1;
        }
        return *this;
    }
    Socket(const Socket &) = delete;
    Socket &operator=(const Socket &) = delete;
    ~Socket() { close(); }

    bool valid() const noexcept { return fd_ >= 0; }
    int fd() const noexcept { return fd_; }

    void close() noexcept {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

    // Unblocks any reader/writer; fd stays valid until close().
    void shutdown_both() noexcept {
        if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
    }

    void set_nodelay() {
        int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    }

    void write_all(const void *data, size_t n) {
        const char *p = static_cast<const char *>(data);
        while (n > 0) {
            ssize_t w = ::send(fd_, p, n, MSG_NOSIGNAL);
            if (w < 0) {
                if (errno == EINTR) continue;
                fail(Errc::io, std::string("send: ") + std::strerror(errno));
            }
            p += w;
            n -= static_cast<size_t>(w);
        }
    }

    // Returns false on a clean EOF before the first byte; errors and
    // mid-stream EOFs throw.
    bool read_exact_or_eof(void *data, size_t n) {
        char *p = static_cast<char *>(data);
        size_t got = 0;
        while (got < n) {
            ssize_t r = ::recv(fd_, p + got, n - got, 0);
            if (r < 0) {
                if (errno == EINTR) continue;
                fail(Errc::io, std::string("recv: ") + std::strerror(errno));
            }
            if (r == 0) {
                if (got == 0) return false;
                fail(Errc::io, "connection closed mid-frame");
            }
            got += static_cast<size_t>(r);
        }
        return true;
    }

    void read_exact(void *data, size_t n) {
        if (!read_exact_or_eof(data, n)) fail(Errc::io, "connection closed");
    }

private:
    int fd_ = -1;
};

// Connects with a bounded wait. Retrying is the caller's policy.
inline Socket dial(const Endpoint &ep, int timeout_ms) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo *res = nullptr;
    std::string port = std::to_string(ep.port);
    int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res);
    if (rc != 0) throw ConnectError("resolve " + ep.str() + ": " + gai_strerror(rc), false);

    int last_errno = 0;
    for (addrinfo *ai = res; ai; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_errno = errno;
            continue;
        }
        int flags = ::fcntl(fd, F_GETFL, 0);
        ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
        rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
        if (rc != 0 && errno == EINPROGRESS) {
            pollfd pfd{fd, POLLOUT, 0};
            rc = ::poll(&pfd, 1, timeout_ms);
            if (rc == 1) {
                int err = 0;
                socklen_t len = sizeof err;
                ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
                errno = err;
                rc = err == 0 ? 0 : -1;
            } else {
                errno = rc == 0 ? ETIMEDOUT : errno;
                rc = -1;
            }
        }
        if (rc == 0) {
            ::fcntl(fd, F_SETFL, flags);
            ::freeaddrinfo(res);
            Socket s(fd);
            s.set_nodelay();
            return s;
        }
        last_errno = errno;
        ::close(fd);
    }
    ::freeaddrinfo(res);
    throw ConnectError("connect " + ep.str() + ": " + std::strerror(last_errno),
                       last_errno == ECONNREFUSED);
}

// Accepting socket with a self-pipe so stop() can wake a blocked accept().
class Listener {
public:
    explicit Listener(const Endpoint &bind_to) {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        hints.ai_flags = AI_PASSIVE;
        addrinfo *res = nullptr;
        std::string port = std::to_string(bind_to.port);
        int rc = ::getaddrinfo(bind_to.host.empty() ? nullptr : bind_to.host.c_str(),
                               port.c_str(), &hints, &res);
        if (rc != 0) fail(Errc::io, "resolve " + bind_to.str() + ": " + gai_strerror(rc));

        int fd = -1;
        for (addrinfo *ai = res; ai; ai = ai->ai_next) {
            fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
            if (fd < 0) continue;
            int one = 1;
            ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
            if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 128) == 0) break;
            ::close(fd);
            fd = -1;
        }
        ::freeaddrinfo(res);
        if (fd < 0) fail(Errc::io, "bind " + bind_to.str() + ": " + std::strerror(errno));
        fd_ = fd;

        sockaddr_storage sa{};
        socklen_t salen = sizeof sa;
        ::getsockname(fd_, reinterpret_cast<sockaddr *>(&sa), &salen);
        char hostbuf[NI_MAXHOST], portbuf[NI_MAXSERV];
        ::getnameinfo(reinterpret_cast<sockaddr *>(&sa), salen, hostbuf, sizeof hostbuf, portbuf,
                      sizeof portbuf, NI_NUMERICHOST | NI_NUMERICSERV);
        local_.host = bind_to.host.empty() ? hostbuf : bind_to.host;
        local_.port = static_cast<uint16_t>(std::stoul(portbuf));

        int pipefd[2];
        if (::pipe2(pipefd, O_CLOEXEC) != 0) {
            ::close(fd_);
            fail(Errc::io, "pipe");
        }
        wake_r_ = pipefd[0];
        wake_w_ = pipefd[1];
    }

    ~Listener() {
        if (fd_ >= 0) ::close(fd_);
        if (wake_r_ >= 0) ::close(wake_r_);
        if (wake_w_ >= 0) ::close(wake_w_);
    }

    Listener(const Listener &) = delete;
    Listener &operator=(const Listener &) = delete;

    const Endpoint &local() const noexcept { return local_; }

    // Blocks for the next peer; nullopt after stop().
    std::optional<Socket> accept() {
        for (;;) {
            pollfd pfds[2] = {{fd_, POLLIN, 0}, {wake_r_, POLLIN, 0}};
            int rc = ::poll(pfds, 2, -1);
            if (rc < 0) {
                if (errno == EINTR) continue;
                fail(Errc::io, std::string("poll: ") + std::strerror(errno));
            }
            if (pfds[1].revents) return std::nullopt;
            if (!(pfds[0].revents & POLLIN)) continue;
            int cfd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
            if (cfd < 0) {
                if (errno == EINTR || errno == ECONNABORTED) continue;
                fail(Errc::io, std::string("accept: ") + std::strerror(errno));
            }
            Socket s(cfd);
            s.set_nodelay();
            return s;
        }
    }

    void stop() {
        char c = 0;
        [[maybe_unused]] ssize_t n = ::write(wake_w_, &c, 1);
    }

private:
    int fd_ = -1;
    int wake_r_ = -1, wake_w_ = -1;
    Endpoint local_;
};

inline void write_frame(Socket &s, const wire::WireMessage &m) {
    std::vector<uint8_t> frame = wire::encode_message(m);
    s.write_all(frame.data(), frame.size());
}

// Reads one complete frame; nullopt on clean EOF at a frame boundary.
inline std::optional<wire::WireMessage> read_frame(Socket &s) {
    uint8_t hdr[wire::kHeaderSize];
    if (!s.read_exact_or_eof(hdr, sizeof hdr)) return std::nullopt;
    wire::FrameHeader h = wire::decode_header(hdr);
    std::vector<uint8_t> body(h.body_len);
    if (h.body_len) s.read_exact(body.data(), body.size());
    wire::Reader r(body.data(), body.size());
    return wire::decode_body(h.kind, r);
}

} // namespace dsvp::net
