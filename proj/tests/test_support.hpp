/// @file test_support.hpp
/// @brief Minimal record/run test harness: one pass/fail line per check,
/// nonzero exit when anything failed.
#pragma once

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>

namespace testing {

inline int g_failures = 0;
inline int g_checks = 0;

inline void record(const std::string& name, bool pass, const std::string& detail = "") {
    ++g_checks;
    if (!pass) ++g_failures;
    std::printf("[%s] %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.empty() ? "" : " ",
                detail.c_str());
    std::fflush(stdout);
}

inline std::string qoi(double value, double threshold) {
    std::ostringstream ss;
    ss.precision(3);
    ss << std::scientific << "(val=" << value << ", thr=" << threshold << ")";
    return ss.str();
}

inline bool approx(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool approx_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

/// Expect `fn` to throw; record accordingly.
template <typename Fn>
void record_throws(const std::string& name, Fn&& fn) {
    bool threw = false;
    std::string what;
    try {
        fn();
    } catch (const std::exception& e) {
        threw = true;
        what = e.what();
    }
    record(name, threw, threw ? "(" + what.substr(0, 90) + ")" : "(no exception)");
}

inline int run(const std::string& suite, const std::function<void()>& body) {
    std::printf("=== %s ===\n", suite.c_str());
    try {
        body();
    } catch (const std::exception& e) {
        record("suite aborted by exception", false, e.what());
    }
    std::printf("=== %s: %d/%d passed ===\n", suite.c_str(), g_checks - g_failures, g_checks);
    return g_failures == 0 ? 0 : 1;
}

} // namespace testing
