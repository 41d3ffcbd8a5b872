// Copyright 2026 The qemit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

namespace qemit::harness {

inline constexpr const char* kVersion = "0.1.0";

/// 12 significant digits; "nan" and "inf" for non-finite values.
std::string num(double v);

/// "# qemit <version> seed=<seed> config=<hash> rng=<engine>"
std::string metadata_line(uint64_t seed, const std::string& config_hash);

struct Csv {
    std::vector<std::string> comments;  // without the leading '#'
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    size_t column(const std::string& name) const;  // throws ConfigError if absent
    std::string render() const;
};

/// Throws ConfigError with line numbers on malformed input.
Csv parse_csv(const std::string& text, const std::string& origin);
Csv read_csv(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

/// Strict decimal parse; throws ConfigError naming `what`.
double parse_number(const std::string& s, const std::string& what);

/// Runs fn(i) for i in [0, n) on at most `threads` workers. Each index is
/// claimed once; callers write results into slot i.
template <typename F>
void parallel_for(size_t n, unsigned threads, F&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<size_t>(n, 1))));
    if (threads == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (size_t i; !failed && (i = next++) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace qemit::harness
