#pragma once

#include "adabkb/kernel.hpp"

#include <string>
#include <sys/types.h>

namespace adabkb {

// Out-of-process objective speaking newline-delimited JSON over stdin/stdout:
// each evaluation writes the coordinates as one JSON array line to the child
// and reads back one JSON number line (lower is better for the child; the
// caller owns any sign convention). The child is spawned once via
// /bin/sh -c and persists across evaluations. Every protocol violation --
// timeout, EOF or child exit before replying, a non-number or non-finite
// reply -- raises std::runtime_error with diagnostics; the instance is dead
// afterwards.
class ExternalObjective {
public:
  // pre: command non-empty; timeout_seconds > 0 (per-evaluation deadline).
  ExternalObjective(std::string command, double timeout_seconds);
  ~ExternalObjective();

  ExternalObjective(const ExternalObjective&) = delete;
  ExternalObjective& operator=(const ExternalObjective&) = delete;

  double evaluate(const Vector& x);

  const std::string& command() const { return command_; }
  bool alive() const { return child_pid_ > 0; }

private:
  std::string read_reply_line();
  void shutdown(bool force);
  [[noreturn]] void fail(const std::string& what);

  std::string command_;
  double timeout_seconds_;
  pid_t child_pid_ = -1;
  int to_child_ = -1;    // write end of the child's stdin
  int from_child_ = -1;  // read end of the child's stdout
  std::string buffer_;   // bytes read past the last newline
};

}  // namespace adabkb
