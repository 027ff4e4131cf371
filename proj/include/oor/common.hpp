#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace oor {

// Domain error with a stable machine-readable kind, surfaced by the CLI as JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define OOR_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}        \
    }

OOR_DEFINE_ERROR(DegenerateInput);
OOR_DEFINE_ERROR(EmptyMesh);
OOR_DEFINE_ERROR(InsufficientRank);
OOR_DEFINE_ERROR(NoCorrespondences);
OOR_DEFINE_ERROR(DegenerateConfiguration);
OOR_DEFINE_ERROR(ConsensusFailure);
OOR_DEFINE_ERROR(OutOfRange);
OOR_DEFINE_ERROR(UnknownContext);
OOR_DEFINE_ERROR(FormatVersionMismatch);
OOR_DEFINE_ERROR(CorruptCheckpoint);
OOR_DEFINE_ERROR(GraphInvalid);
OOR_DEFINE_ERROR(DimensionMismatch);
OOR_DEFINE_ERROR(InsufficientSamples);
OOR_DEFINE_ERROR(ParseError);

#undef OOR_DEFINE_ERROR

// Seeded RNG. Draws are defined here (not delegated to std distributions) so
// that identical seeds give identical streams on any standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // uniform index in [0, n)
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    // independent child stream, e.g. one per sample in a batch
    Rng child() { return Rng(engine_()); }

private:
    std::mt19937_64 engine_;
};

}  // namespace oor
