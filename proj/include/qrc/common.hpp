// Copyright 2026 The qrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <bit>
#include <complex>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace qrc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Error hierarchy. Every failure the library raises derives from qrc::Error so
// callers that isolate failures (the sweep harness) can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed register, coupling or dimension specification.
class InvalidSpecError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite values or loss of trace during propagation.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A recurrence (NARMA) left its bounded region.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Least-squares system too close to singular for the requested lambda.
class IllConditionedError : public Error {
public:
    using Error::Error;
};

// Warnings go to std::clog unless silenced (tests and the sweep silence them
// and count instead).
namespace detail {
inline std::atomic<bool>& warnings_enabled() {
    static std::atomic<bool> flag{true};
    return flag;
}
inline std::atomic<std::uint64_t>& warning_count() {
    static std::atomic<std::uint64_t> count{0};
    return count;
}
}  // namespace detail

inline void set_warnings_enabled(bool on) { detail::warnings_enabled() = on; }
inline std::uint64_t warning_count() { return detail::warning_count().load(); }

inline void warn(std::string_view msg) {
    ++detail::warning_count();
    if (detail::warnings_enabled()) std::clog << "qrc warning: " << msg << '\n';
}

// ---------------------------------------------------------------------------
// Seeding. splitmix64 is used both to expand seeds and to hash coordinates
// into per-point seeds; the engines are std::mt19937_64, and doubles are
// produced from the top 53 bits so streams are identical across standard
// library implementations.

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
    return splitmix64(seed ^ splitmix64(value + 0x632BE59BD9B4E019ULL));
}

inline std::uint64_t hash_combine(std::uint64_t seed, double value) {
    // +0.0 and -0.0 hash alike
    if (value == 0.0) value = 0.0;
    return hash_combine(seed, std::bit_cast<std::uint64_t>(value));
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return hash_combine(seed, h);
}

template <class Engine>
double uniform01(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

template <class Engine>
double uniform(Engine& engine, double lo, double hi) {
    return lo + (hi - lo) * uniform01(engine);
}

}  // namespace qrc
