// Command-line entry points: node daemon, example programs, and the
// create/sync latency benchmark.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsvp/dsvp.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

dsvp::NodeConfig load_config(const std::string &path) {
    dsvp::NodeConfig cfg;
    if (!path.empty()) cfg = dsvp::NodeConfig::from_file(path);
    cfg.apply_env();
    return cfg;
}

int cmd_serve(const std::string &config_path, const std::string &endpoint_file) {
    dsvp::NodeConfig cfg = load_config(config_path);
    if (cfg.listen.empty()) {
        std::cerr << "serve: config has no listen endpoint\n";
        return 2;
    }
    dsvp::NodeRuntime nrt(cfg);
    dsvp::demo::register_demo_functions(nrt);
    nrt.start_server();
    auto ep = nrt.server_endpoint();
    std::cout << "dsvp: node " << cfg.node_id << " listening on " << ep.str() << "\n";
    std::cout << "dsvp: functions: empty fibonacci fib_slow stamp_fill bump_all counter_inc "
                 "counter_get counter_intervals spin_forever sleep_ms chain_spin\n";
    std::cout.flush();
    if (!endpoint_file.empty()) {
        std::ofstream f(endpoint_file);
        f << ep.str() << "\n";
    }
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    std::cout << "dsvp: shutting down\n";
    nrt.stop_server();
    return 0;
}

int cmd_fib(int64_t n, const std::string &place, const std::string &config_path) {
    dsvp::NodeConfig cfg = load_config(config_path);
    dsvp::NodeRuntime nrt(cfg);
    dsvp::demo::register_demo_functions(nrt);

    std::vector<int64_t> result(static_cast<size_t>(n), 0);
    result[0] = 0;
    result[1] = 1;

    dsvp::FamilyDescriptor desc;
    desc.place = nrt.resolve_place(place);
    desc.range = dsvp::RangeSpec{2, n, 1, 0};
    desc.function = "fibonacci";
    desc.shareds = {dsvp::Value::of_i64(1), dsvp::Value::of_i64(0)};
    desc.globals = {dsvp::Value::of_buffer(
        dsvp::Buffer::alias(dsvp::TypeCode::i64, result.data(), result.size()))};

    dsvp::SyncResult res = nrt.route_create(std::move(desc))->sync();
    if (!res.completed()) {
        std::cerr << "fib: " << dsvp::status_name(res.status)
                  << (res.detail.empty() ? "" : ": " + res.detail) << "\n";
        return 1;
    }
    for (size_t i = 0; i < result.size(); ++i)
        std::cout << result[i] << (i + 1 < result.size() ? " " : "\n");
    return 0;
}

int cmd_bench(const std::string &place, int iters, const std::string &mode,
              const std::string &out, int bucket_us, const std::string &config_path) {
    dsvp::NodeConfig cfg = load_config(config_path);
    dsvp::NodeRuntime nrt(cfg);
    dsvp::demo::register_demo_functions(nrt);

    dsvp::bench::BenchOptions opt;
    opt.place = place;
    opt.iterations = iters;
    opt.cold = mode == "cold";
    opt.bucket_width_ns = int64_t(bucket_us) * 1000;

    dsvp::bench::BenchResult r;
    try {
        r = dsvp::bench::run(nrt, opt);
    } catch (const std::exception &e) {
        std::cerr << "bench: aborted: " << e.what() << "\n";
        return 1;
    }
    std::cout << r.header << r.hist.summary() << "\n" << r.hist.bucket_table();
    if (!out.empty()) {
        dsvp::bench::write_raw_log(r, out);
        std::cout << "raw log written to " << out << "\n";
    }
    return 0;
}

// Watchdog plus restart demonstration: a deliberately slow family on the
// primary place gets killed by its deadline, then the same work restarts
// on the alternate place and completes.
int cmd_kill_demo(const std::string &place, const std::string &alt_place, int deadline_ms,
                  const std::string &config_path) {
    dsvp::NodeConfig cfg = load_config(config_path);
    dsvp::NodeRuntime nrt(cfg);
    dsvp::demo::register_demo_functions(nrt);

    constexpr int64_t n = 8;
    std::vector<int64_t> result(n, 0);
    result[0] = 0;
    result[1] = 1;

    dsvp::FamilyDescriptor desc;
    desc.place = nrt.resolve_place(place);
    desc.range = dsvp::RangeSpec{2, n, 1, 0};
    desc.function = "fib_slow";
    desc.shareds = {dsvp::Value::of_i64(1), dsvp::Value::of_i64(0)};
    desc.globals = {dsvp::Value::of_buffer(
                        dsvp::Buffer::alias(dsvp::TypeCode::i64, result.data(), result.size())),
                    dsvp::Value::of_i64(10 * deadline_ms)};

    dsvp::FamilyDescriptor retry_desc = desc;
    retry_desc.globals[1] = dsvp::Value::of_i64(0); // no delay on the retry

    dsvp::FamilyHandle h = nrt.create_with_retry(std::move(desc), nrt.default_policy());
    nrt.arm_watchdog(h, std::chrono::milliseconds(deadline_ms));
    dsvp::SyncResult first = h->sync();
    std::cout << "first attempt on '" << place << "': " << dsvp::status_name(first.status)
              << " (" << dsvp::failure_name(first.failure) << ")\n";
    if (first.completed()) {
        std::cout << "family completed before the watchdog fired; nothing to restart\n";
        return 0;
    }

    dsvp::SyncResult second =
        nrt.restart_on(nrt.resolve_place(alt_place), std::move(retry_desc),
                       nrt.default_policy(), h);
    std::cout << "restart on '" << alt_place << "': " << dsvp::status_name(second.status)
              << "\n";
    if (!second.completed()) return 1;
    for (size_t i = 0; i < result.size(); ++i)
        std::cout << result[i] << (i + 1 < result.size() ? " " : "\n");
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"dsvp: distributed fork-join runtime"};
    app.require_subcommand(1);

    std::string config_path;

    auto *serve = app.add_subcommand("serve", "run the node daemon");
    std::string endpoint_file;
    serve->add_option("--config", config_path, "node configuration file")->required();
    serve->add_option("--endpoint-file", endpoint_file,
                      "write the bound listen endpoint to this file");

    auto *fib = app.add_subcommand("fib", "run the Fibonacci example");
    int64_t fib_n = 8;
    std::string place = "local";
    fib->add_option("N", fib_n, "sequence length (>= 2)")->required()->check(CLI::Range(
        int64_t(2), int64_t(1) << 40));
    fib->add_option("--place", place, "place to create the family on");
    fib->add_option("--config", config_path, "node configuration file");

    auto *bench = app.add_subcommand("bench", "create/sync latency benchmark");
    int iters = 10'000;
    std::string mode = "warm", out;
    int bucket_us = 10;
    bench->add_option("--place", place, "target place");
    bench->add_option("--iters", iters, "iterations")->check(CLI::PositiveNumber);
    bench->add_option("--mode", mode, "warm: reuse the connection; cold: reconnect per iteration")
        ->check(CLI::IsMember({"warm", "cold"}));
    bench->add_option("--out", out, "write the raw per-sample log here");
    bench->add_option("--bucket-us", bucket_us, "histogram bucket width in microseconds")
        ->check(CLI::PositiveNumber);
    bench->add_option("--config", config_path, "node configuration file");

    auto *killdemo = app.add_subcommand("kill-demo", "watchdog kill and restart on an alternate place");
    std::string alt_place = "local";
    int deadline_ms = 150;
    killdemo->add_option("--place", place, "primary place")->required();
    killdemo->add_option("--alt-place", alt_place, "alternate place for the restart");
    killdemo->add_option("--deadline-ms", deadline_ms, "watchdog deadline");
    killdemo->add_option("--config", config_path, "node configuration file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve->parsed()) return cmd_serve(config_path, endpoint_file);
        if (fib->parsed()) return cmd_fib(fib_n, place, config_path);
        if (bench->parsed()) return cmd_bench(place, iters, mode, out, bucket_us, config_path);
        if (killdemo->parsed())
            return cmd_kill_demo(place, alt_place, deadline_ms, config_path);
    } catch (const dsvp::SvpError &e) {
        std::cerr << "dsvp: " << e.what() << "\n";
        return e.code() == dsvp::Errc::config || e.code() == dsvp::Errc::io ? 2 : 1;
    } catch (const std::exception &e) {
        std::cerr << "dsvp: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
