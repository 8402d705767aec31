#include "adabkb/external.hpp"

#include <nlohmann/json.hpp>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <utility>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace adabkb {

namespace {

using json = nlohmann::json;

// A dead child turns writes into SIGPIPE unless the signal is ignored; we
// want the EPIPE errno instead so the failure surfaces as an exception.
void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::string describe_exit(int status) {
  if (WIFEXITED(status)) {
    return "exited with status " + std::to_string(WEXITSTATUS(status));
  }
  if (WIFSIGNALED(status)) {
    return "killed by signal " + std::to_string(WTERMSIG(status));
  }
  return "ended with raw wait status " + std::to_string(status);
}

}  // namespace

ExternalObjective::ExternalObjective(std::string command, double timeout_seconds)
    : command_(std::move(command)), timeout_seconds_(timeout_seconds) {
  if (command_.empty()) throw std::invalid_argument("external command must be non-empty");
  if (!(timeout_seconds_ > 0)) {
    throw std::invalid_argument("external evaluation timeout must be positive");
  }
  ignore_sigpipe_once();

  int in_pipe[2];   // parent -> child stdin
  int out_pipe[2];  // child stdout -> parent
  if (::pipe(in_pipe) != 0) throw std::runtime_error("pipe() failed for child stdin");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw std::runtime_error("pipe() failed for child stdout");
  }

  child_pid_ = ::fork();
  if (child_pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw std::runtime_error("fork() failed");
  }
  if (child_pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ExternalObjective::~ExternalObjective() { shutdown(false); }

void ExternalObjective::shutdown(bool force) {
  if (to_child_ >= 0) {
    ::close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    ::close(from_child_);
    from_child_ = -1;
  }
  if (child_pid_ > 0) {
    if (force) {
      ::kill(child_pid_, SIGKILL);
    } else {
      // Its stdin is closed; give a cooperative child a moment to exit.
      for (int i = 0; i < 50; ++i) {
        int status = 0;
        if (::waitpid(child_pid_, &status, WNOHANG) != 0) {
          child_pid_ = -1;
          return;
        }
        ::usleep(10000);
      }
      ::kill(child_pid_, SIGKILL);
    }
    int status = 0;
    ::waitpid(child_pid_, &status, 0);
    child_pid_ = -1;
  }
}

void ExternalObjective::fail(const std::string& what) {
  shutdown(true);
  throw std::runtime_error("external objective '" + command_ + "': " + what);
}

std::string ExternalObjective::read_reply_line() {
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_seconds_);
  for (;;) {
    const std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      fail("timed out after " + std::to_string(timeout_seconds_) + " s waiting for a reply");
    }
    struct pollfd pfd;
    pfd.fd = from_child_;
    pfd.events = POLLIN;
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail(std::string("poll() failed: ") + std::strerror(errno));
    }
    if (ready == 0) {
      fail("timed out after " + std::to_string(timeout_seconds_) + " s waiting for a reply");
    }
    char chunk[4096];
    const ssize_t got = ::read(from_child_, chunk, sizeof(chunk));
    if (got < 0) {
      if (errno == EINTR) continue;
      fail(std::string("read() failed: ") + std::strerror(errno));
    }
    if (got == 0) {
      // EOF almost always means the child is exiting; wait briefly so the
      // diagnostic can carry its exit status.
      std::string detail = "closed stdout before replying";
      for (int attempt = 0; attempt < 100 && child_pid_ > 0; ++attempt) {
        int status = 0;
        if (::waitpid(child_pid_, &status, WNOHANG) == child_pid_) {
          child_pid_ = -1;
          detail += " (" + describe_exit(status) + ")";
          break;
        }
        ::usleep(2000);
      }
      fail(detail);
    }
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

double ExternalObjective::evaluate(const Vector& x) {
  if (child_pid_ <= 0) fail("child process is not running");

  json coords = json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) coords.push_back(x[i]);
  std::string message = coords.dump();
  message.push_back('\n');

  std::size_t written = 0;
  while (written < message.size()) {
    const ssize_t n = ::write(to_child_, message.data() + written, message.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("write() failed: ") + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }

  const std::string line = read_reply_line();
  json reply;
  try {
    reply = json::parse(line);
  } catch (const json::parse_error&) {
    fail("reply is not valid JSON: '" + line + "'");
  }
  if (!reply.is_number()) {
    fail("reply is not a JSON number: '" + line + "'");
  }
  const double value = reply.get<double>();
  if (!std::isfinite(value)) {
    fail("reply is not finite: '" + line + "'");
  }
  return value;
}

}  // namespace adabkb
