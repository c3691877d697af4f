#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "aqv/model.hpp"

namespace aqv {

/// Raised when a tester cannot deliver the requested observations.
class TesterError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Source of new observations for one component.
class Tester {
   public:
    virtual ~Tester() = default;
    /// n observations for every state of component j (0-based). `round` is
    /// the 1-based verification round.
    virtual ObservationFunction test(std::size_t component, std::uint64_t n, std::size_t round) = 0;
    virtual bool parallel_safe() const { return false; }
};

/// SplitMix64 finaliser step.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the sub-stream for (seed, component, round, state). Streams of
/// different components never depend on each other.
std::uint64_t stream_seed(std::uint64_t seed, std::size_t component, std::size_t round, StateIndex state);

/// `name = value` lines, `#` comments. Every parameter must be assigned.
Valuation parse_truth(std::string_view text, const ParametricDtmc& m);
Valuation load_truth(const std::string& path, const ParametricDtmc& m);
/// Every parametric state's distribution must lie in [0,1] and sum to 1.
void validate_truth(const ModelBundle& bundle, const Valuation& truth);

/// Categorical sampling from the model instantiated at a ground truth,
/// one mt19937_64 per (seed, component, round, state).
class SimulatedTester : public Tester {
   public:
    SimulatedTester(const ModelBundle& bundle, Valuation truth, std::uint64_t seed);
    ObservationFunction test(std::size_t component, std::uint64_t n, std::size_t round) override;
    bool parallel_safe() const override { return true; }

   private:
    const ModelBundle& bundle_;
    Valuation truth_;
    std::uint64_t seed_;
    std::vector<std::vector<double>> weights_;
};

/// Runs `path j n` (j 1-based) and reads `z s count` lines from its stdout.
class ScriptTester : public Tester {
   public:
    ScriptTester(const ModelBundle& bundle, std::string path);
    ObservationFunction test(std::size_t component, std::uint64_t n, std::size_t round) override;

   private:
    const ModelBundle& bundle_;
    std::string path_;
};

/// Parses script output for component j; throws TesterError on protocol errors.
ObservationFunction parse_test_output(const ModelBundle& bundle, std::size_t component, std::uint64_t n,
                                      std::string_view text);

/// Asks for counts per successor on a console.
class InteractiveTester : public Tester {
   public:
    InteractiveTester(const ModelBundle& bundle, std::istream& in, std::ostream& out, int attempts = 4);
    ObservationFunction test(std::size_t component, std::uint64_t n, std::size_t round) override;

   private:
    const ModelBundle& bundle_;
    std::istream& in_;
    std::ostream& out_;
    int attempts_;
};

}  // namespace aqv
