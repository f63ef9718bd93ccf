#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <sys/types.h>

#include "cpd/contact_plan.hpp"
#include "cpd/objective.hpp"

namespace cpd {

inline constexpr int kWireProtocolVersion = 1;
inline constexpr std::chrono::milliseconds kDefaultEvaluationTimeout{30000};

// Line-oriented byte stream to a remote evaluator. Failures surface as EvaluationError.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void send_line(std::string_view line) = 0;
    // Blocks for at most `timeout`; the returned line has its trailing newline removed.
    virtual std::string receive_line(std::chrono::milliseconds timeout) = 0;
};

// Transport over a connected stream socket. When `child` is set, the process is reaped on destruction.
class SocketTransport : public Transport {
public:
    explicit SocketTransport(int fd, pid_t child = -1);
    ~SocketTransport() override;
    SocketTransport(const SocketTransport&) = delete;
    SocketTransport& operator=(const SocketTransport&) = delete;

    void send_line(std::string_view line) override;
    std::string receive_line(std::chrono::milliseconds timeout) override;

private:
    int fd_;
    pid_t child_;
    std::string buffer_;
};

std::unique_ptr<Transport> connect_tcp(const std::string& host, int port);

// Runs `command` through /bin/sh with its stdin and stdout attached to one end of a socket pair.
std::unique_ptr<Transport> spawn_process(const std::string& command);

// "exec:<command>" spawns a process; "host:port" or "tcp://host:port" opens a TCP connection.
std::unique_ptr<Transport> open_endpoint(std::string_view endpoint);

// One protocol session: hello/hello_ack on construction, eval/result per request, shutdown on destruction.
class SurrogateClient {
public:
    SurrogateClient(std::unique_ptr<Transport> transport, int node_count, int step_count,
                    std::chrono::milliseconds timeout = kDefaultEvaluationTimeout);
    ~SurrogateClient();
    SurrogateClient(const SurrogateClient&) = delete;
    SurrogateClient& operator=(const SurrogateClient&) = delete;

    // Normalized objective predicted for `plan`.
    double evaluate(const ContactPlan& plan);

    int node_count() const { return node_count_; }
    int step_count() const { return step_count_; }

private:
    std::unique_ptr<Transport> transport_;
    int node_count_;
    int step_count_;
    std::chrono::milliseconds timeout_;
    long long next_id_ = 1;
    bool alive_ = true;
};

// Remote prediction wrapped as an objective value; triple and unreachable counts are left unset.
ObjectiveValue evaluate_remote(const ContactPlan& plan, SurrogateClient& client);

class RemoteEvaluator : public Evaluator {
public:
    explicit RemoteEvaluator(SurrogateClient& client) : client_(client) {}

    ObjectiveValue evaluate(const ContactPlan& plan) override { return evaluate_remote(plan, client_); }
    EvaluatorKind kind() const override { return EvaluatorKind::Surrogate; }

private:
    SurrogateClient& client_;
};

}  // namespace cpd
