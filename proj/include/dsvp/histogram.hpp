#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace dsvp {

// One paired create+sync of an empty thread function, in nanoseconds.
using LatencySample = int64_t;

// Fixed-width latency histogram plus the summary statistics. Percentiles
// use the nearest-rank definition on the sorted samples:
// p(q) = sorted[ceil(q * n) - 1].
struct Histogram {
    int64_t bucket_width_ns = 10'000; // 10 us
    std::vector<uint64_t> buckets;    // bucket i counts [i*w, (i+1)*w)
    uint64_t n = 0;
    int64_t min_ns = 0;
    int64_t max_ns = 0;
    double mean_ns = 0.0;
    int64_t p50_ns = 0;
    int64_t p99_ns = 0;

    static int64_t nearest_rank(const std::vector<LatencySample> &sorted, double q) {
        size_t rank = static_cast<size_t>(std::max<double>(
            1.0, std::ceil(q * static_cast<double>(sorted.size()))));
        if (rank > sorted.size()) rank = sorted.size();
        return sorted[rank - 1];
    }

    static Histogram from_samples(const std::vector<LatencySample> &samples,
                                  int64_t bucket_width_ns = 10'000) {
        if (samples.empty()) fail(Errc::invalid_range, "histogram needs at least one sample");
        if (bucket_width_ns <= 0) fail(Errc::invalid_range, "bucket width must be positive");
        Histogram h;
        h.bucket_width_ns = bucket_width_ns;
        h.n = samples.size();

        std::vector<LatencySample> sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        if (sorted.front() < 0) fail(Errc::invalid_range, "negative latency sample");
        h.min_ns = sorted.front();
        h.max_ns = sorted.back();
        int64_t total = 0;
        for (LatencySample s : sorted) total += s;
        h.mean_ns = static_cast<double>(total) / static_cast<double>(h.n);
        h.p50_ns = nearest_rank(sorted, 0.50);
        h.p99_ns = nearest_rank(sorted, 0.99);

        h.buckets.assign(static_cast<size_t>(h.max_ns / bucket_width_ns) + 1, 0);
        for (LatencySample s : sorted) ++h.buckets[static_cast<size_t>(s / bucket_width_ns)];
        return h;
    }

    std::string summary() const {
        std::ostringstream os;
        os << "n=" << n << " mean_ns=" << mean_ns << " min_ns=" << min_ns << " p50_ns=" << p50_ns
           << " p99_ns=" << p99_ns << " max_ns=" << max_ns
           << " bucket_width_ns=" << bucket_width_ns;
        return os.str();
    }

    // One "bucket_start count" line per non-empty bucket.
    std::string bucket_table() const {
        std::ostringstream os;
        for (size_t i = 0; i < buckets.size(); ++i)
            if (buckets[i])
                os << i * static_cast<uint64_t>(bucket_width_ns) << " " << buckets[i] << "\n";
        return os.str();
    }
};

} // namespace dsvp
