#pragma once

#include <algorithm>
#include <cstddef>
#include <future>
#include <thread>
#include <vector>

namespace paintmo::detail {

inline std::size_t resolve_threads(std::size_t requested) {
    if (requested == 0) {
        requested = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    return requested;
}

/// Calls body(begin, end) over contiguous chunks of [0, n). Chunks run on
/// separate threads only when there is enough work to pay for them; the
/// chunk boundaries do not depend on timing, so callers that write into
/// per-index slots get deterministic results.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t threads, std::size_t min_chunk, Body&& body) {
    threads = resolve_threads(threads);
    const std::size_t chunks = std::min(threads, std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk)));
    if (chunks <= 1) {
        body(std::size_t{0}, n);
        return;
    }
    const std::size_t step = (n + chunks - 1) / chunks;
    std::vector<std::future<void>> jobs;
    for (std::size_t c = 1; c < chunks; ++c) {
        const std::size_t begin = std::min(n, c * step);
        const std::size_t end = std::min(n, begin + step);
        jobs.push_back(std::async(std::launch::async, [&body, begin, end] { body(begin, end); }));
    }
    body(std::size_t{0}, std::min(n, step));
    for (auto& j : jobs) j.get();
}

} // namespace paintmo::detail
