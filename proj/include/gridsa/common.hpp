#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gridsa {

// Error taxonomy mirrored by the CLI exit codes: usage -> 1, numeric -> 2, io -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

inline bool env_flag(const char* name, bool fallback = false) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    return !(v[0] == '0' || v[0] == 'n' || v[0] == 'N' || v[0] == 'f' || v[0] == 'F');
}

inline int worker_count() {
    if (const char* v = std::getenv("GRIDSA_WORKERS")) {
        int n = std::atoi(v);
        if (n >= 1) return n;
    }
    if (env_flag("GRIDSA_DETERMINISTIC")) return 1;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n) on `workers` threads. Results must be written to
// pre-sized slots indexed by i so the merge order never depends on scheduling.
void parallel_for_indexed(int n, int workers, const std::function<void(int)>& fn);

}  // namespace gridsa
