#include <cerrno>
#include <csignal>
#include <cstring>
#include <chrono>

#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "paintmo/original.hpp"

namespace paintmo {

ProcessEvaluator::ProcessEvaluator(std::vector<std::string> command, ProcessEvaluatorOptions options)
    : command_(std::move(command)), options_(options) {
    require(!command_.empty(), "evaluator command must not be empty");
}

ProcessEvaluator::~ProcessEvaluator() { stop(); }

void ProcessEvaluator::start() {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
        throw Error(ErrorKind::evaluator, std::string("socketpair failed: ") + std::strerror(errno));
    }
    std::vector<char*> argv;
    for (auto& a : command_) argv.push_back(a.data());
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw Error(ErrorKind::evaluator, std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::dup2(fds[1], STDIN_FILENO);
        ::dup2(fds[1], STDOUT_FILENO);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }
    ::close(fds[1]);
    pid_ = pid;
    to_child_ = fds[0];
    from_child_ = fds[0];
    buffer_.clear();
}

void ProcessEvaluator::stop() {
    if (to_child_ >= 0) {
        ::close(to_child_);
        to_child_ = from_child_ = -1;
    }
    if (pid_ > 0) {
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, nullptr, 0);
        pid_ = -1;
    }
    buffer_.clear();
}

std::optional<std::string> ProcessEvaluator::exchange(const std::string& line) {
    std::size_t sent = 0;
    while (sent < line.size()) {
        const auto n = ::send(to_child_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return std::nullopt;
        sent += static_cast<std::size_t>(n);
    }
    const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
    while (true) {
        if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
            std::string reply = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            return reply;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return std::nullopt;
        pollfd p{from_child_, POLLIN, 0};
        const int r = ::poll(&p, 1, static_cast<int>(left.count()));
        if (r < 0 && errno == EINTR) continue;
        if (r <= 0) return std::nullopt;
        char chunk[4096];
        const auto n = ::recv(from_child_, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return std::nullopt;
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

Point ProcessEvaluator::operator()(std::span<const double> x) {
    std::lock_guard lock(mutex_);
    nlohmann::json request{{"x", std::vector<double>(x.begin(), x.end())}};
    const std::string line = request.dump() + "\n";
    for (std::size_t attempt = 0; attempt <= options_.max_restarts; ++attempt) {
        if (pid_ < 0) {
            start();
        } else if (attempt > 0) {
            stop();
            ++restarts_;
            start();
        }
        const auto reply = exchange(line);
        if (!reply) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(*reply);
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorKind::evaluator, "evaluator replied with malformed JSON: " + reply->substr(0, 200));
        }
        if (doc.contains("error")) {
            throw Error(ErrorKind::evaluator, "evaluator reported: " + doc["error"].dump());
        }
        try {
            return doc.at("f").get<Point>();
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorKind::evaluator, "evaluator reply lacks a numeric \"f\" array");
        }
    }
    stop();
    throw Error(ErrorKind::evaluator, "evaluator did not answer after " + std::to_string(options_.max_restarts) +
                                          " restarts");
}

Evaluator make_process_evaluator(std::vector<std::string> command, ProcessEvaluatorOptions options) {
    auto shared = std::make_shared<ProcessEvaluator>(std::move(command), options);
    return [shared](std::span<const double> x) { return (*shared)(x); };
}

} // namespace paintmo
