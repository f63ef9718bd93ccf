#include "cpd/surrogate_client.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

#include <json.hpp>

#include "cpd/error.hpp"

namespace cpd {

using nlohmann::json;

namespace {

std::string errno_text() { return std::strerror(errno); }

}  // namespace

SocketTransport::SocketTransport(int fd, pid_t child) : fd_(fd), child_(child) {}

SocketTransport::~SocketTransport() {
    if (fd_ >= 0) ::close(fd_);
    if (child_ > 0) {
        // Closing the socket ends the child's stdin; give it a moment, then make sure it is gone.
        for (int k = 0; k < 50; ++k) {
            if (::waitpid(child_, nullptr, WNOHANG) != 0) return;
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        ::kill(child_, SIGKILL);
        ::waitpid(child_, nullptr, 0);
    }
}

void SocketTransport::send_line(std::string_view line) {
    std::string data(line);
    data += '\n';
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw EvaluationError("evaluator connection: send failed: " + errno_text());
        }
        sent += static_cast<std::size_t>(n);
    }
}

std::string SocketTransport::receive_line(std::chrono::milliseconds timeout) {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + timeout;
    for (;;) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
        if (left.count() <= 0)
            throw EvaluationError("evaluator connection: no response within " + std::to_string(timeout.count()) + " ms");
        pollfd p{fd_, POLLIN, 0};
        const int ready = ::poll(&p, 1, static_cast<int>(left.count()));
        if (ready < 0) {
            if (errno == EINTR) continue;
            throw EvaluationError("evaluator connection: poll failed: " + errno_text());
        }
        if (ready == 0) continue;
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw EvaluationError("evaluator connection: receive failed: " + errno_text());
        }
        if (n == 0) throw EvaluationError("evaluator connection closed by peer");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::unique_ptr<Transport> connect_tcp(const std::string& host, int port) {
    if (port <= 0 || port > 65535) throw InvalidSpecError("endpoint: port " + std::to_string(port) + " out of range");
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const std::string service = std::to_string(port);
    if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0)
        throw EvaluationError("endpoint " + host + ":" + service + ": " + ::gai_strerror(rc));
    std::string last_error = "no address";
    for (addrinfo* ai = found; ai; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = errno_text();
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            ::freeaddrinfo(found);
            return std::make_unique<SocketTransport>(fd);
        }
        last_error = errno_text();
        ::close(fd);
    }
    ::freeaddrinfo(found);
    throw EvaluationError("endpoint " + host + ":" + service + ": " + last_error);
}

std::unique_ptr<Transport> spawn_process(const std::string& command) {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0)
        throw EvaluationError("evaluator process: socketpair failed: " + errno_text());
    const std::string script = "exec " + command;
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(sv[0]);
        ::close(sv[1]);
        throw EvaluationError("evaluator process: fork failed: " + errno_text());
    }
    if (pid == 0) {
        ::dup2(sv[1], STDIN_FILENO);
        ::dup2(sv[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", script.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(sv[1]);
    return std::make_unique<SocketTransport>(sv[0], pid);
}

std::unique_ptr<Transport> open_endpoint(std::string_view endpoint) {
    if (endpoint.starts_with("exec:")) {
        const std::string command(endpoint.substr(5));
        if (command.empty()) throw InvalidSpecError("endpoint: empty command after 'exec:'");
        return spawn_process(command);
    }
    if (endpoint.starts_with("tcp://")) endpoint.remove_prefix(6);
    const auto colon = endpoint.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == endpoint.size())
        throw InvalidSpecError("endpoint '" + std::string(endpoint) + "': expected host:port or exec:<command>");
    int port = 0;
    for (char c : endpoint.substr(colon + 1)) {
        if (c < '0' || c > '9') throw InvalidSpecError("endpoint '" + std::string(endpoint) + "': bad port");
        port = port * 10 + (c - '0');
        if (port > 65535) throw InvalidSpecError("endpoint '" + std::string(endpoint) + "': bad port");
    }
    std::string host(endpoint.substr(0, colon));
    if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    return connect_tcp(host, port);
}

namespace {

json read_message(Transport& transport, std::chrono::milliseconds timeout) {
    const std::string line = transport.receive_line(timeout);
    json msg;
    try {
        msg = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ProtocolError("evaluator sent malformed JSON: " + std::string(e.what()));
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
        throw ProtocolError("evaluator message lacks a string 'type': " + line);
    if (msg["type"] == "error") {
        const std::string text = msg.contains("message") && msg["message"].is_string() ? msg["message"].get<std::string>() : line;
        throw ProtocolError("evaluator reported error: " + text);
    }
    return msg;
}

}  // namespace

SurrogateClient::SurrogateClient(std::unique_ptr<Transport> transport, int node_count, int step_count,
                                 std::chrono::milliseconds timeout)
    : transport_(std::move(transport)), node_count_(node_count), step_count_(step_count), timeout_(timeout) {
    if (!transport_) throw InvalidSpecError("surrogate client: no transport");
    if (node_count < 1 || step_count < 1) throw InvalidSpecError("surrogate client: empty scenario");
    if (timeout.count() <= 0) throw InvalidSpecError("surrogate client: timeout must be positive");
    try {
        transport_->send_line(json{{"type", "hello"}, {"version", kWireProtocolVersion}, {"n_nodes", node_count},
                                   {"n_steps", step_count}}
                                  .dump());
        const json ack = read_message(*transport_, timeout_);
        if (ack["type"] != "hello_ack") throw ProtocolError("handshake: expected hello_ack, got " + ack.dump());
        if (!ack.contains("version") || !ack["version"].is_number_integer())
            throw ProtocolError("handshake: hello_ack without integer version");
        if (ack["version"].get<int>() != kWireProtocolVersion)
            throw ProtocolError("handshake: evaluator speaks version " + std::to_string(ack["version"].get<int>()) +
                                ", expected " + std::to_string(kWireProtocolVersion));
    } catch (...) {
        alive_ = false;
        throw;
    }
}

SurrogateClient::~SurrogateClient() {
    if (!alive_) return;
    try {
        transport_->send_line(R"({"type":"shutdown"})");
    } catch (const Error&) {
    }
}

double SurrogateClient::evaluate(const ContactPlan& plan) {
    if (!alive_) throw EvaluationError("surrogate session is closed");
    if (plan.node_count() != node_count_ || plan.step_count() != step_count_)
        throw DimensionError("surrogate: plan shape " + std::to_string(plan.node_count()) + "x" +
                             std::to_string(plan.step_count()) + " does not match the session");
    json contacts = json::array();
    for (int t = 0; t < plan.step_count(); ++t)
        for (const Edge& e : plan.edges(t)) contacts.push_back({t, e.a, e.b});
    const long long id = next_id_++;
    try {
        transport_->send_line(json{{"type", "eval"}, {"id", id}, {"contacts", std::move(contacts)}}.dump());
        for (;;) {
            const json msg = read_message(*transport_, timeout_);
            if (msg["type"] != "result") throw ProtocolError("expected result, got " + msg.dump());
            if (!msg.contains("id") || !msg["id"].is_number_integer()) throw ProtocolError("result without integer id");
            const long long got = msg["id"].get<long long>();
            if (got < id) continue;  // stale answer to an abandoned request
            if (got != id) throw ProtocolError("result for unknown request id " + std::to_string(got));
            if (!msg.contains("objective") || !msg["objective"].is_number())
                throw ProtocolError("result " + std::to_string(id) + " without numeric objective");
            return msg["objective"].get<double>();
        }
    } catch (...) {
        alive_ = false;
        throw;
    }
}

ObjectiveValue evaluate_remote(const ContactPlan& plan, SurrogateClient& client) {
    ObjectiveValue v;
    v.normalized = client.evaluate(plan);
    return v;
}

}  // namespace cpd
