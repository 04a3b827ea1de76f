#include "hornitp/backend.h"

#include "hornitp/sexpr.h"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <mutex>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace hornitp {

namespace {

// Writes to a backend that has exited must surface as errors, not signals.
void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

std::string exit_description(int status) {
    if (WIFEXITED(status)) { return "exited with status " + std::to_string(WEXITSTATUS(status)); }
    if (WIFSIGNALED(status)) { return "killed by signal " + std::to_string(WTERMSIG(status)); }
    return "stopped";
}

} // namespace

std::string backend_request(const Constraint & a, const Constraint & b) {
    VarSet vars = free_vars(a);
    VarSet vb = free_vars(b);
    vars.insert(vb.begin(), vb.end());
    std::string out = "(interpolate (vars";
    for (auto const & v : vars) { out += " (" + quote_symbol(v.name) + " " + to_string(v.sort) + ")"; }
    out += ") (A " + to_sexpr(a) + ") (B " + to_sexpr(b) + "))\n";
    return out;
}

ExternalInterpolator::ExternalInterpolator(std::string command, EngineOptions options, std::chrono::milliseconds timeout)
    : command_(std::move(command)), options_(options), timeout_(timeout) {
    ignore_sigpipe();
    int in[2], out[2];
    if (pipe2(in, O_CLOEXEC) != 0) { throw BackendError(std::string("pipe: ") + std::strerror(errno)); }
    if (pipe2(out, O_CLOEXEC) != 0) {
        close(in[0]);
        close(in[1]);
        throw BackendError(std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = fork();
    if (pid_ < 0) {
        for (int fd : {in[0], in[1], out[0], out[1]}) { close(fd); }
        throw BackendError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
        // own process group, so that stopping the backend reaches its children too
        setpgid(0, 0);
        dup2(in[0], STDIN_FILENO);
        dup2(out[1], STDOUT_FILENO);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char *>(nullptr));
        _exit(127);
    }
    setpgid(pid_, pid_);
    close(in[0]);
    close(out[1]);
    to_child_ = in[1];
    from_child_ = out[0];
}

ExternalInterpolator::~ExternalInterpolator() { stop(); }

void ExternalInterpolator::stop() {
    if (to_child_ >= 0) { close(to_child_); }
    if (from_child_ >= 0) { close(from_child_); }
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        // closing stdin asks the backend to finish; give it a moment
        int status = 0;
        bool exited = false;
        for (int i = 0; i < 20 && !exited; ++i) {
            exited = waitpid(pid_, &status, WNOHANG) == pid_;
            if (!exited) { usleep(5000); }
        }
        kill(-pid_, SIGKILL);
        if (!exited) { waitpid(pid_, &status, 0); }
        pid_ = -1;
    }
}

void ExternalInterpolator::fail(const std::string & message) {
    std::string msg = "backend '" + command_ + "': " + message;
    if (pid_ > 0) {
        int status = 0;
        if (waitpid(pid_, &status, WNOHANG) == pid_) {
            kill(-pid_, SIGKILL);
            pid_ = -1;
            msg += " (" + exit_description(status) + ")";
        }
    }
    stop();
    throw BackendError(msg);
}

std::string ExternalInterpolator::read_line() {
    auto const deadline = std::chrono::steady_clock::now() + timeout_;
    for (;;) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) { fail("no reply within " + std::to_string(timeout_.count()) + " ms"); }
        pollfd p{from_child_, POLLIN, 0};
        int r = poll(&p, 1, int(left.count()));
        if (r < 0 && errno == EINTR) { continue; }
        if (r < 0) { fail(std::string("poll: ") + std::strerror(errno)); }
        if (r == 0) { continue; }
        char chunk[4096];
        ssize_t n = read(from_child_, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) { continue; }
        if (n < 0) { fail(std::string("read: ") + std::strerror(errno)); }
        if (n == 0) {
            int status = 0;
            if (pid_ > 0 && waitpid(pid_, &status, 0) == pid_) {
                kill(-pid_, SIGKILL);
                pid_ = -1;
                fail("closed its output, " + exit_description(status));
            }
            fail("closed its output");
        }
        buffer_.append(chunk, std::size_t(n));
    }
}

Constraint ExternalInterpolator::interpolate(const Constraint & a, const Constraint & b) {
    if (to_child_ < 0) { throw BackendError("backend '" + command_ + "' is not running"); }
    std::string request = backend_request(a, b);
    for (std::size_t done = 0; done < request.size();) {
        ssize_t n = write(to_child_, request.data() + done, request.size() - done);
        if (n < 0 && errno == EINTR) { continue; }
        if (n < 0) { fail(std::string("write: ") + std::strerror(errno)); }
        done += std::size_t(n);
    }
    std::string line = read_line();

    VarSet vars = free_vars(a);
    VarSet vb = free_vars(b);
    vars.insert(vb.begin(), vb.end());
    std::map<std::string, Var> by_name;
    for (auto const & v : vars) { by_name.emplace(v.name, v); }
    VarLookup lookup = [&](const std::string & n) -> const Var * {
        auto it = by_name.find(n);
        return it == by_name.end() ? nullptr : &it->second;
    };

    std::vector<SExpr> reply;
    try {
        reply = read_sexprs(line);
    } catch (const ParseError & e) {
        fail("unreadable reply: " + std::string(e.what()));
    }
    if (reply.size() != 1 || !reply[0].is_list() || reply[0].items.empty()) { fail("malformed reply: " + line); }
    SExpr const & r = reply[0];

    if (r.is_call("error")) {
        fail("reported error: " + (r.items.size() > 1 ? r.items[1].text : std::string()));
    }
    if (r.is_call("interpolant") && r.items.size() == 2) {
        Constraint itp;
        try {
            itp = parse_constraint(r.items[1], lookup);
        } catch (const UndeclaredSymbol & e) {
            throw VerificationFailed("backend interpolant mentions a variable outside A and B: " + std::string(e.what()));
        } catch (const ParseError & e) {
            fail("malformed interpolant: " + std::string(e.what()));
        } catch (const SortError & e) {
            fail("ill-sorted interpolant: " + std::string(e.what()));
        }
        if (auto why = check_interpolant(a, b, itp, options_)) {
            throw VerificationFailed("backend interpolant rejected: " + *why);
        }
        return itp;
    }
    if (r.is_call("sat") && r.items.size() == 2 && r.items[1].is_call("model")) {
        Model m;
        try {
            for (std::size_t i = 1; i < r.items[1].items.size(); ++i) {
                SExpr const & entry = r.items[1].items[i];
                if (!entry.is_list() || entry.items.size() != 2 || !entry.items[0].is_symbol()) {
                    fail("malformed model entry: " + to_string(entry));
                }
                const Var * v = lookup(entry.items[0].text);
                if (!v) { throw VerificationFailed("backend model assigns unknown variable " + entry.items[0].text); }
                Rational value = parse_rational(entry.items[1]);
                if (v->sort == Sort::Int && value.get_den() != 1) {
                    throw VerificationFailed("backend model gives Int variable " + v->name + " a fractional value");
                }
                m[*v] = value;
            }
        } catch (const ParseError & e) {
            fail("malformed model: " + std::string(e.what()));
        }
        for (auto const & v : vars) { m.emplace(v, Rational(0)); }
        if (!evaluate(a, m) || !evaluate(b, m)) { throw VerificationFailed("backend model does not satisfy A and B"); }
        throw NotUnsat(m, "backend reports A and B satisfiable");
    }
    fail("malformed reply: " + line);
}

} // namespace hornitp
