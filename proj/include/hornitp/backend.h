#pragma once

#include "hornitp/interpolation.h"

#include <chrono>
#include <string>
#include <sys/types.h>

namespace hornitp {

// Request line sent to a backend for the pair (A, B).
std::string backend_request(const Constraint & a, const Constraint & b);

// Interpolation by an external process started with `/bin/sh -c command`,
// speaking one request line and one reply line at a time over its stdin and
// stdout. Replies are checked locally before being accepted. One request in
// flight per instance; use one instance per worker.
class ExternalInterpolator : public Interpolator {
public:
    explicit ExternalInterpolator(std::string command, EngineOptions options = {},
                                  std::chrono::milliseconds timeout = std::chrono::seconds(60));
    ~ExternalInterpolator() override;
    ExternalInterpolator(const ExternalInterpolator &) = delete;
    ExternalInterpolator & operator=(const ExternalInterpolator &) = delete;

    // Throws BackendError (malformed reply, exit, timeout), VerificationFailed
    // (reply fails the interpolant conditions or the model does not satisfy
    // A and B), or NotUnsat with the backend's model.
    Constraint interpolate(const Constraint & a, const Constraint & b) override;
    const EngineOptions & options() const override { return options_; }
    const std::string & command() const { return command_; }

private:
    std::string read_line();
    [[noreturn]] void fail(const std::string & message);
    void stop();

    std::string command_;
    EngineOptions options_;
    std::chrono::milliseconds timeout_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

} // namespace hornitp
