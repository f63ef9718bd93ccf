// Minimal remote evaluator for exercising the wire protocol: answers every eval with a constant.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <netinet/in.h>
#include <sstream>
#include <string>
#include <sys/socket.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

using nlohmann::json;

namespace {

struct Options {
    double value = 0.5;
    int version = 1;
    int kill_after = -1;     // SIGKILL self on receiving eval number kill_after + 1
    int garbage_after = -1;  // answer eval number garbage_after + 1 with a non-JSON line
    int stall_after = -1;    // stop answering after this many evals
};

// Returns false when the session should end.
bool handle(const std::string& line, const Options& opt, int& evals, std::ostream& out) {
    json msg;
    try {
        msg = json::parse(line);
    } catch (const json::parse_error& e) {
        out << json{{"type", "error"}, {"id", nullptr}, {"message", std::string("bad json: ") + e.what()}}.dump() << "\n"
            << std::flush;
        return true;
    }
    const std::string type = msg.is_object() && msg.contains("type") && msg["type"].is_string() ? msg["type"].get<std::string>() : "";
    const json id = msg.is_object() && msg.contains("id") ? msg["id"] : json(nullptr);
    if (type == "hello") {
        out << json{{"type", "hello_ack"}, {"version", opt.version}}.dump() << "\n" << std::flush;
    } else if (type == "eval") {
        if (opt.kill_after >= 0 && evals >= opt.kill_after) ::raise(SIGKILL);
        if (opt.stall_after >= 0 && evals >= opt.stall_after) {
            ++evals;
            return true;
        }
        if (opt.garbage_after >= 0 && evals >= opt.garbage_after) {
            out << "this is not json\n" << std::flush;
        } else {
            out << json{{"type", "result"}, {"id", id}, {"objective", opt.value}}.dump() << "\n" << std::flush;
        }
        ++evals;
    } else if (type == "shutdown") {
        return false;
    } else {
        out << json{{"type", "error"}, {"id", id}, {"message", "unknown type '" + type + "'"}}.dump() << "\n" << std::flush;
    }
    return true;
}

int serve_stream(std::istream& in, std::ostream& out, const Options& opt) {
    int evals = 0;
    std::string line;
    while (std::getline(in, line))
        if (!handle(line, opt, evals, out)) break;
    return 0;
}

int serve_tcp(int port, const std::string& port_file, const Options& opt) {
    const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) return 1;
    int one = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listener, 1) != 0) {
        std::perror("stub: bind/listen");
        return 1;
    }
    socklen_t len = sizeof addr;
    ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
    if (!port_file.empty()) {
        const std::string tmp = port_file + ".tmp";
        std::ofstream(tmp) << ntohs(addr.sin_port) << "\n";
        std::rename(tmp.c_str(), port_file.c_str());
    }
    const int fd = ::accept(listener, nullptr, nullptr);
    ::close(listener);
    if (fd < 0) return 1;

    int evals = 0;
    std::string buffer;
    char chunk[4096];
    for (;;) {
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t nl;
        while ((nl = buffer.find('\n')) != std::string::npos) {
            const std::string line = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            std::ostringstream reply;
            const bool go_on = handle(line, opt, evals, reply);
            const std::string text = reply.str();
            if (!text.empty()) ::send(fd, text.data(), text.size(), MSG_NOSIGNAL);
            if (!go_on) {
                ::close(fd);
                return 0;
            }
        }
    }
    ::close(fd);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constant-valued evaluator speaking the line-delimited JSON protocol on stdin/stdout or TCP"};
    Options opt;
    int tcp_port = -1;
    std::string port_file;
    app.add_option("--value", opt.value, "Objective returned for every eval")->capture_default_str();
    app.add_option("--version", opt.version, "Protocol version announced in hello_ack")->capture_default_str();
    app.add_option("--kill-after", opt.kill_after, "Kill itself with SIGKILL when eval number N+1 arrives");
    app.add_option("--garbage-after", opt.garbage_after, "Reply with a malformed line from eval number N+1 on");
    app.add_option("--stall-after", opt.stall_after, "Stop answering evals after N replies");
    app.add_option("--tcp", tcp_port, "Serve one TCP session on 127.0.0.1:PORT instead of stdin/stdout (0 picks a port)");
    app.add_option("--port-file", port_file, "Write the bound TCP port to this file");
    CLI11_PARSE(app, argc, argv);

    std::signal(SIGPIPE, SIG_IGN);
    if (tcp_port >= 0) return serve_tcp(tcp_port, port_file, opt);
    return serve_stream(std::cin, std::cout, opt);
}
