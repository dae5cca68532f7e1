#include "tap/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace tap {

unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_chunks(std::size_t count, unsigned workers,
                     const std::function<void(unsigned, std::size_t, std::size_t)> &fn) {
    if (count == 0)
        return;
    if (workers == 0)
        workers = 1;
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(workers, count));

    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto run_chunk = [&](unsigned chunk) {
        const std::size_t base = count / w;
        const std::size_t rem = count % w;
        const std::size_t begin = chunk * base + std::min<std::size_t>(chunk, rem);
        const std::size_t end = begin + base + (chunk < rem ? 1 : 0);
        try {
            fn(chunk, begin, end);
        } catch (...) {
            if (!failed.exchange(true))
                first_error = std::current_exception();
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(w - 1);
    for (unsigned chunk = 1; chunk < w; ++chunk)
        threads.emplace_back(run_chunk, chunk);
    run_chunk(0);
    for (auto &t : threads)
        t.join();

    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace tap
