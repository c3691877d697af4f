#include "aqv/harness.hpp"

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace aqv {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::size_t component, std::size_t round, StateIndex state) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ splitmix64(0x436f6d70ULL + component));
    h = splitmix64(h ^ splitmix64(0x526f756eULL + round));
    return splitmix64(h ^ splitmix64(0x53746174ULL + state));
}

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Valuation parse_truth(std::string_view text, const ParametricDtmc& m) {
    Valuation v(m.params.size(), std::nan(""));
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ModelError("truth: expected 'name = value'", line_no);
        const auto name = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto p = m.find_param(name);
        if (!p) throw ModelError("truth: unknown parameter '" + name + "'", line_no);
        try {
            const auto f = parse_expr(value, {});
            v[*p] = f.constant_value().get_d();
        } catch (const ExprSyntaxError& e) {
            throw ModelError(std::string("truth: ") + e.what(), line_no);
        }
    }
    for (std::size_t p = 0; p < v.size(); ++p) {
        if (std::isnan(v[p])) throw ModelError("truth: parameter '" + m.params[p] + "' has no value");
    }
    return v;
}

Valuation load_truth(const std::string& path, const ParametricDtmc& m) { return parse_truth(read_file(path), m); }

void validate_truth(const ModelBundle& bundle, const Valuation& truth) {
    const auto& m = bundle.model;
    if (truth.size() != m.params.size()) throw ModelError("truth does not cover every parameter");
    for (auto z : bundle.parametric_states()) {
        double sum = 0;
        for (const auto& t : m.transitions[z]) {
            const double p = eval(t.prob, truth);
            if (p < -1e-12 || p > 1 + 1e-12) {
                throw ModelError("truth gives " + m.states[z] + " -> " + m.states[t.target] +
                                 " a probability outside [0,1]");
            }
            sum += p;
        }
        if (std::abs(sum - 1) > 1e-9) throw ModelError("truth: outgoing probabilities of '" + m.states[z] + "' do not sum to 1");
    }
}

SimulatedTester::SimulatedTester(const ModelBundle& bundle, Valuation truth, std::uint64_t seed)
    : bundle_(bundle), truth_(std::move(truth)), seed_(seed) {
    validate_truth(bundle_, truth_);
    const auto& m = bundle_.model;
    weights_.resize(m.num_states());
    for (auto z : bundle_.parametric_states()) {
        for (const auto& t : m.transitions[z]) weights_[z].push_back(std::max(0.0, eval(t.prob, truth_)));
    }
}

ObservationFunction SimulatedTester::test(std::size_t component, std::uint64_t n, std::size_t round) {
    ObservationFunction out;
    if (n == 0) return out;
    const auto& edges = bundle_.model.transitions;
    for (auto z : bundle_.components.at(component).z_states) {
        std::mt19937_64 rng(stream_seed(seed_, component, round, z));
        std::discrete_distribution<std::size_t> pick(weights_[z].begin(), weights_[z].end());
        std::vector<std::uint64_t> counts(weights_[z].size(), 0);
        for (std::uint64_t i = 0; i < n; ++i) ++counts[pick(rng)];
        for (std::size_t e = 0; e < counts.size(); ++e) {
            if (counts[e]) out.add(z, edges[z][e].target, counts[e]);
        }
    }
    return out;
}

ObservationFunction parse_test_output(const ModelBundle& bundle, std::size_t component, std::uint64_t n,
                                      std::string_view text) {
    const auto& m = bundle.model;
    const auto& comp = bundle.components.at(component);
    ObservationFunction out;
    std::map<StateIndex, std::uint64_t> sums;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::istringstream fields(line);
        std::string z_name;
        std::string s_name;
        std::string count_text;
        std::string extra;
        if (!(fields >> z_name >> s_name >> count_text) || (fields >> extra)) {
            throw TesterError("test output line " + std::to_string(line_no) + ": expected '<state> <state> <count>'");
        }
        if (count_text.find_first_not_of("0123456789") != std::string::npos || count_text.size() > 18) {
            throw TesterError("test output line " + std::to_string(line_no) + ": bad count '" + count_text + "'");
        }
        const auto z = m.find_state(z_name);
        if (!z || std::find(comp.z_states.begin(), comp.z_states.end(), *z) == comp.z_states.end()) {
            throw TesterError("test output line " + std::to_string(line_no) + ": '" + z_name +
                              "' is not a state of component " + comp.name);
        }
        const auto s = m.find_state(s_name);
        if (!s || m.probability(*z, *s).is_zero()) {
            throw TesterError("test output line " + std::to_string(line_no) + ": no transition " + z_name + " -> " +
                              s_name);
        }
        const auto c = std::stoull(count_text);
        out.add(*z, *s, c);
        sums[*z] += c;
    }
    for (auto z : comp.z_states) {
        if (sums[z] != n) {
            throw TesterError("test output for " + m.states[z] + " sums to " + std::to_string(sums[z]) +
                              ", expected " + std::to_string(n));
        }
    }
    return out;
}

ScriptTester::ScriptTester(const ModelBundle& bundle, std::string path) : bundle_(bundle), path_(std::move(path)) {}

ObservationFunction ScriptTester::test(std::size_t component, std::uint64_t n, std::size_t) {
    if (n == 0) return {};
    int fds[2];
    if (pipe(fds) != 0) throw TesterError(std::string("pipe: ") + std::strerror(errno));
    const std::string j = std::to_string(component + 1);
    const std::string count = std::to_string(n);
    const pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        throw TesterError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        dup2(fds[1], STDOUT_FILENO);
        close(fds[0]);
        close(fds[1]);
        std::vector<char*> argv{const_cast<char*>(path_.c_str()), const_cast<char*>(j.c_str()),
                                const_cast<char*>(count.c_str()), nullptr};
        execv(path_.c_str(), argv.data());
        _exit(127);
    }
    close(fds[1]);
    std::string text;
    char buf[4096];
    for (;;) {
        const auto got = read(fds[0], buf, sizeof buf);
        if (got < 0 && errno == EINTR) continue;
        if (got <= 0) break;
        text.append(buf, static_cast<std::size_t>(got));
    }
    close(fds[0]);
    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        throw TesterError("testing script '" + path_ + "' failed for component " + j + " (exit status " +
                          std::to_string(code) + ")");
    }
    return parse_test_output(bundle_, component, n, text);
}

InteractiveTester::InteractiveTester(const ModelBundle& bundle, std::istream& in, std::ostream& out, int attempts)
    : bundle_(bundle), in_(in), out_(out), attempts_(attempts) {}

ObservationFunction InteractiveTester::test(std::size_t component, std::uint64_t n, std::size_t) {
    const auto& m = bundle_.model;
    const auto& comp = bundle_.components.at(component);
    ObservationFunction out;
    if (n == 0) return out;
    out_ << "component " << comp.name << ": " << n << " observation(s) needed for each of";
    for (auto z : comp.z_states) out_ << ' ' << m.states[z];
    out_ << '\n';
    for (auto z : comp.z_states) {
        const auto& edges = m.transitions[z];
        bool done = false;
        for (int attempt = 0; attempt < attempts_ && !done; ++attempt) {
            out_ << "  counts from " << m.states[z] << " to";
            for (const auto& t : edges) out_ << ' ' << m.states[t.target];
            out_ << " (total " << n << "): " << std::flush;
            std::string line;
            if (!std::getline(in_, line)) throw TesterError("end of input while reading observations");
            std::istringstream fields(line);
            std::vector<std::uint64_t> counts;
            std::string tok;
            bool ok = true;
            while (fields >> tok) {
                if (tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 18) {
                    ok = false;
                    break;
                }
                counts.push_back(std::stoull(tok));
            }
            std::uint64_t sum = 0;
            for (auto c : counts) sum += c;
            if (!ok || counts.size() != edges.size()) {
                out_ << "  expected " << edges.size() << " non-negative integers\n";
                continue;
            }
            if (sum != n) {
                out_ << "  counts sum to " << sum << ", expected " << n << '\n';
                continue;
            }
            for (std::size_t e = 0; e < edges.size(); ++e) {
                if (counts[e]) out.add(z, edges[e].target, counts[e]);
            }
            done = true;
        }
        if (!done) throw TesterError("too many invalid entries for state " + m.states[z]);
    }
    return out;
}

}  // namespace aqv
