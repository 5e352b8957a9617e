#pragma once

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ncg {

// Error classes. The CLI maps them onto exit codes (validation/domain -> 1,
// numerical/resource/consistency -> 2).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};
struct ResourceError : Error {
    using Error::Error;
};
struct ConsistencyError : Error {
    using Error::Error;
};

/// Process-wide numeric settings shared by every module.
///
/// `epsilon` is the float-backend comparison tolerance. `max_ambient` caps the
/// dimension (sum r_i^2)^(n+1) of any tensor space that gets enumerated.
/// `max_l` overrides the default Chern degree rule when positive.
struct Settings {
    std::atomic<double> epsilon{1e-9};
    std::atomic<unsigned long long> max_ambient{100000};
    std::atomic<int> max_l{-1};
};

inline Settings& settings() {
    static Settings s;
    static const bool env_applied = [] {
        if (const char* env = std::getenv("NCG_BUDGET")) {
            try {
                s.max_ambient = std::stoull(env);
            } catch (...) {
            }
        }
        return true;
    }();
    (void)env_applied;
    return s;
}

inline double epsilon() { return settings().epsilon.load(); }
inline unsigned long long ambient_budget() { return settings().max_ambient.load(); }

inline void require_ambient(unsigned long long dim, const std::string& what) {
    if (dim > ambient_budget())
        throw ResourceError(what + ": ambient dimension " + std::to_string(dim) +
                            " exceeds budget " + std::to_string(ambient_budget()));
}

// Saturating power used for budget checks.
inline unsigned long long checked_pow(unsigned long long base, unsigned exp) {
    unsigned long long r = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (base != 0 && r > ~0ULL / base)
            return ~0ULL;
        r *= base;
    }
    return r;
}

}  // namespace ncg
