#pragma once

#include <chrono>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "histogram.hpp"
#include "node.hpp"

namespace dsvp::bench {

// Single-threaded by design: the loop measures per-interaction latency of
// one paired create and sync of the empty thread function, without
// queueing effects. "cold" drops the pooled connection before every
// iteration so connection establishment is part of each sample; "warm"
// reuses one connection.
struct BenchOptions {
    std::string place = "local";
    int iterations = 10'000;
    bool cold = false;
    int64_t bucket_width_ns = 10'000;
};

struct BenchResult {
    std::vector<LatencySample> samples;
    Histogram hist;
    std::string header; // '#'-prefixed metadata lines
};

inline std::string host_cpu_summary() {
    std::ostringstream os;
    os << "hardware_concurrency=" << std::thread::hardware_concurrency();
    std::ifstream f("/proc/cpuinfo");
    std::string line;
    while (std::getline(f, line)) {
        if (line.rfind("model name", 0) == 0) {
            auto colon = line.find(':');
            if (colon != std::string::npos) os << " cpu=" << line.substr(colon + 2);
            break;
        }
    }
    return os.str();
}

inline BenchResult run(NodeRuntime &nrt, const BenchOptions &opt) {
    if (opt.iterations < 1) fail(Errc::invalid_range, "iterations must be at least 1");
    using Clock = std::chrono::steady_clock;

    Place place = nrt.resolve_place(opt.place);
    BenchResult out;
    out.samples.reserve(static_cast<size_t>(opt.iterations));

    FamilyDescriptor desc;
    desc.place = place;
    desc.range = RangeSpec{0, 1, 1, 0};
    desc.function = "empty";

    // One throwaway interaction so warm mode measures a settled path.
    if (!opt.cold) {
        FamilyDescriptor d = desc;
        SyncResult warmup = nrt.route_create(std::move(d))->sync();
        if (!warmup.completed())
            fail(Errc::io, "warmup create failed: " + std::string(status_name(warmup.status)) +
                               " " + warmup.detail);
    }

    for (int i = 0; i < opt.iterations; ++i) {
        if (opt.cold) nrt.drop_connections();
        FamilyDescriptor d = desc;
        auto t0 = Clock::now();
        FamilyHandle h = nrt.route_create(std::move(d));
        SyncResult res = h->sync();
        auto t1 = Clock::now();
        if (!res.completed())
            fail(Errc::io, "iteration " + std::to_string(i) + " did not complete: " +
                               status_name(res.status) + " " + res.detail +
                               " (partial results discarded)");
        out.samples.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    }

    out.hist = Histogram::from_samples(out.samples, opt.bucket_width_ns);

    std::ostringstream hdr;
    hdr << "# place=" << opt.place << " node=" << place.node_id
        << " mode=" << (opt.cold ? "cold" : "warm") << " iterations=" << opt.iterations << "\n"
        << "# " << host_cpu_summary() << "\n"
        << "# " << out.hist.summary() << "\n";
    out.header = hdr.str();
    return out;
}

// Raw log: the header lines, then one sample per line in nanoseconds.
inline void write_raw_log(const BenchResult &r, const std::string &path) {
    std::ofstream f(path);
    if (!f) fail(Errc::io, "cannot write " + path);
    f << r.header;
    for (LatencySample s : r.samples) f << s << "\n";
}

} // namespace dsvp::bench
