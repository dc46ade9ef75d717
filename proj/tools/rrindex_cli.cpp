#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/resource.h>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rrindex/index.hpp"
#include "rrindex/locate.hpp"
#include "rrindex/oracle.hpp"
#include "rrindex/serialize.hpp"
#include "rrindex/text_access.hpp"
#include "rrindex/update.hpp"

using namespace rrindex;
using nlohmann::json;

namespace {

// exit codes: 0 ok, 2 usage, 3 data, 4 invariant or verification failure

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string decode_hex(const std::string& s) {
    if (s.size() % 2) throw DataError("hex string has odd length: " + s);
    std::string out;
    out.reserve(s.size() / 2);
    for (size_t i = 0; i < s.size(); i += 2) {
        int hi = hex_digit(s[i]), lo = hex_digit(s[i + 1]);
        if (hi < 0 || lo < 0) throw DataError("bad hex digit in: " + s);
        out.push_back(static_cast<char>(hi * 16 + lo));
    }
    return out;
}

std::string encode_hex(std::string_view s) {
    static const char* d = "0123456789abcdef";
    std::string out;
    out.reserve(s.size() * 2);
    for (unsigned char c : s) {
        out.push_back(d[c >> 4]);
        out.push_back(d[c & 15]);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
}

u64 seed_from_env(u64 fallback) {
    const char* e = std::getenv("RRINDEX_SEED");
    if (!e || !*e) return fallback;
    try {
        return std::stoull(e);
    } catch (...) {
        throw DataError("RRINDEX_SEED is not a number");
    }
}

u64 peak_rss_bytes() {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    return static_cast<u64>(ru.ru_maxrss) * 1024;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

struct BuildArgs {
    std::string text_path, out_path;
    u64 seed = 0;
    u32 w = 2, kappa = 8, alpha = 0, attempts = 8;
    bool seed_given = false;
};

int run_build(const BuildArgs& a) {
    std::string text = read_file(a.text_path);
    BuildOptions opt;
    opt.seed = a.seed_given ? a.seed : seed_from_env(a.seed);
    opt.w = a.w;
    opt.kappa = a.kappa;
    opt.budget_alpha = a.alpha;
    opt.max_attempts = a.attempts;
    auto t0 = std::chrono::steady_clock::now();
    Index ix = build_index(text, opt);
    double build_ms = ms_since(t0);
    save_index(ix, a.out_path);
    bool seen[256] = {};
    for (unsigned char c : text) seen[c] = true;
    int sigma = 0;
    for (bool b : seen) sigma += b;
    IndexStats st = index_stats(ix);
    json out = {{"n", st.n},          {"sigma", sigma},
                {"H", st.height},     {"M", st.records},
                {"impl_nodes", st.impl_nodes}, {"rules", st.grammar_size},
                {"seed", ix.seed},    {"build_ms", build_ms}};
    std::cout << out.dump() << "\n";
    return 0;
}

void print_locate(const std::string& label, const std::vector<u64>& occ,
                  double us, bool as_json, bool timed) {
    if (as_json) {
        json out = {{"count", occ.size()}, {"positions", occ}};
        if (!label.empty()) out["pattern"] = label;
        if (timed) out["us"] = us;
        std::cout << out.dump() << "\n";
        return;
    }
    std::ostringstream line;
    if (!label.empty()) line << label << "\t";
    line << "count=" << occ.size();
    if (timed) line << "\tus=" << us;
    std::cout << line.str() << "\n";
    if (!occ.empty()) {
        for (size_t i = 0; i < occ.size(); ++i)
            std::cout << (i ? " " : "") << occ[i];
        std::cout << "\n";
    }
}

struct LocateArgs {
    std::string index_path, pattern, pattern_file;
    bool raw = false, as_json = false, naive_vocc = false;
};

int run_locate(const LocateArgs& a) {
    Index ix = load_index(a.index_path);
    auto to_bytes = [&](const std::string& s) {
        return a.raw ? s : decode_hex(s);
    };
    if (!a.pattern_file.empty()) {
        std::ifstream f(a.pattern_file);
        if (!f) throw DataError("cannot open " + a.pattern_file);
        std::string line;
        size_t idx = 0;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            std::string p = to_bytes(line);
            auto t0 = std::chrono::steady_clock::now();
            std::vector<u64> occ = locate(ix, p, nullptr, a.naive_vocc);
            double us = ms_since(t0) * 1000.0;
            print_locate(std::to_string(idx++), occ, us, a.as_json, true);
        }
        return 0;
    }
    std::vector<u64> occ = locate(ix, to_bytes(a.pattern), nullptr, a.naive_vocc);
    print_locate("", occ, 0, a.as_json, false);
    return 0;
}

struct ApplyArgs {
    std::string index_path, ops_path, verify_against;
    bool raw = false, as_json = false;
};

int run_apply(const ApplyArgs& a) {
    Index ix = load_index(a.index_path);
    std::string ref;
    bool verify = !a.verify_against.empty();
    if (verify) {
        ref = read_file(a.verify_against);
        if (extract(ix, 1, ix.text_len) != ref)
            throw InvariantError("reference text differs from the index");
    }
    std::ifstream f(a.ops_path);
    if (!f) throw DataError("cannot open " + a.ops_path);
    std::string line;
    size_t lineno = 0;
    auto to_bytes = [&](const std::string& s) {
        return a.raw ? s : decode_hex(s);
    };
    try {
        while (std::getline(f, line)) {
            ++lineno;
            std::istringstream is(line);
            std::string op;
            if (!(is >> op) || op[0] == '#') continue;
            if (op == "I") {
                u64 pos;
                std::string payload;
                if (!(is >> pos >> payload)) throw DataError("malformed insert");
                insert_text(ix, pos, to_bytes(payload));
                if (verify) ref = oracle::splice_insert(ref, pos, to_bytes(payload));
            } else if (op == "D") {
                u64 pos, len;
                if (!(is >> pos >> len)) throw DataError("malformed delete");
                delete_text(ix, pos, len);
                if (verify) ref = oracle::splice_delete(ref, pos, len);
            } else if (op == "Q") {
                std::string payload;
                if (!(is >> payload)) throw DataError("malformed query");
                std::vector<u64> occ = locate(ix, to_bytes(payload));
                print_locate("line " + std::to_string(lineno), occ, 0,
                             a.as_json, false);
            } else {
                throw DataError("unknown op " + op);
            }
            if (verify && extract(ix, 1, ix.text_len) != ref)
                throw InvariantError("index text diverged from the reference");
        }
    } catch (const DataError& e) {
        throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const InvariantError& e) {
        throw InvariantError("line " + std::to_string(lineno) + ": " + e.what());
    }
    save_index(ix, a.index_path);
    return 0;
}

struct StatsArgs {
    std::string index_path;
    u64 delta_limit = 4096;
};

int run_stats(const StatsArgs& a) {
    Index ix = load_index(a.index_path);
    IndexStats st = index_stats(ix);
    json out = {{"n", st.n},
                {"H", st.height},
                {"M", st.records},
                {"impl_nodes", st.impl_nodes},
                {"edges", st.edges},
                {"peak_rss", peak_rss_bytes()}};
    if (st.n <= a.delta_limit)
        out["delta_naive"] = oracle::naive_delta(extract(ix, 1, ix.text_len));
    std::cout << out.dump() << "\n";
    return 0;
}

int run_verify(const std::string& index_path) {
    Index ix = load_index(index_path);
    verify_index(ix);
    // exact-answer spot check against a scan on small inputs
    if (ix.text_len <= 4096) {
        std::string t = extract(ix, 1, ix.text_len);
        std::mt19937_64 rng(1);
        for (int q = 0; q < 32; ++q) {
            u64 pos = 1 + rng() % t.size();
            u64 len = 1 + rng() % std::min<u64>(t.size() - pos + 1, 8);
            std::string p = t.substr(pos - 1, len);
            if (q % 4 == 0) p[rng() % p.size()] ^= 1;
            if (locate(ix, p) != oracle::naive_occ(t, p))
                throw InvariantError("locate differs from a naive scan");
        }
    }
    std::cout << "OK\n";
    return 0;
}

struct ExtractArgs {
    std::string index_path;
    u64 pos = 1, len = 0;
    bool raw = false;
};

int run_extract(const ExtractArgs& a) {
    Index ix = load_index(a.index_path);
    std::string s = extract(ix, a.pos, a.len);
    if (a.raw)
        std::cout << s << "\n";
    else
        std::cout << encode_hex(s) << "\n";
    return 0;
}

struct BenchArgs {
    std::string index_path;
    std::vector<u64> lens{10, 100};
    u32 repeats = 100, warmup = 5;
    u64 rng_seed = 12345;
    bool seed_given = false;
};

struct Series {
    double mean_ms = 0, stddev_ms = 0;
};

Series summarize(const std::vector<double>& xs) {
    Series s;
    for (double x : xs) s.mean_ms += x;
    s.mean_ms /= xs.empty() ? 1 : xs.size();
    double var = 0;
    for (double x : xs) var += (x - s.mean_ms) * (x - s.mean_ms);
    s.stddev_ms = xs.size() > 1 ? std::sqrt(var / (xs.size() - 1)) : 0;
    return s;
}

int run_bench(const BenchArgs& a) {
    Index ix = load_index(a.index_path);
    u64 seed = a.seed_given ? a.rng_seed : seed_from_env(a.rng_seed);
    std::mt19937_64 rng(seed);
    std::cout << "# bench_seed=" << seed << " repeats=" << a.repeats
              << " warmup=" << a.warmup << " n=" << ix.text_len << "\n";
    std::cout << "op,m,mean_ms,stddev_ms\n";
    auto emit = [](const char* op, u64 m, const Series& s) {
        std::cout << op << "," << m << "," << s.mean_ms << "," << s.stddev_ms
                  << "\n";
    };
    for (u64 m : a.lens) {
        if (m == 0 || m > ix.text_len) throw DataError("bench length out of range");
        std::vector<double> times;
        for (u32 r = 0; r < a.repeats + a.warmup; ++r) {
            u64 pos = 1 + rng() % (ix.text_len - m + 1);
            std::string p = extract(ix, pos, m);
            auto t0 = std::chrono::steady_clock::now();
            volatile size_t k = locate(ix, p).size();
            (void)k;
            if (r >= a.warmup) times.push_back(ms_since(t0));
        }
        emit("locate", m, summarize(times));
    }
    for (u64 m : a.lens) {
        std::vector<double> ins_times, del_times;
        for (u32 r = 0; r < a.repeats + a.warmup; ++r) {
            u64 pos = 1 + rng() % (ix.text_len + 1);
            std::string p(m, '\0');
            for (auto& c : p) c = static_cast<char>('a' + rng() % 26);
            auto t0 = std::chrono::steady_clock::now();
            insert_text(ix, pos, p);
            double ti = ms_since(t0);
            t0 = std::chrono::steady_clock::now();
            delete_text(ix, pos, m);
            double td = ms_since(t0);
            if (r >= a.warmup) {
                ins_times.push_back(ti);
                del_times.push_back(td);
            }
        }
        emit("insert", m, summarize(ins_times));
        emit("delete", m, summarize(del_times));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic compressed text self-index"};
    app.require_subcommand(1);

    BuildArgs ba;
    auto* build = app.add_subcommand("build", "index a text file");
    build->add_option("--text", ba.text_path, "input text")->required();
    build->add_option("--out", ba.out_path, "output index")->required();
    auto* seed_opt = build->add_option("--seed", ba.seed, "construction seed");
    build->add_option("--w", ba.w, "height bound failure exponent");
    build->add_option("--kappa", ba.kappa, "coordinate prefix bytes");
    build->add_option("--alpha", ba.alpha, "ancestor cache budget offset");
    build->add_option("--attempts", ba.attempts, "height bound retries");

    LocateArgs la;
    auto* loc = app.add_subcommand("locate", "report pattern occurrences");
    loc->add_option("--index", la.index_path, "index file")->required();
    auto* pat = loc->add_option("--pattern", la.pattern, "pattern (hex)");
    auto* patf = loc->add_option("--pattern-file", la.pattern_file,
                                 "one pattern per line");
    pat->excludes(patf);
    loc->add_flag("--raw", la.raw, "patterns are literal bytes, not hex");
    loc->add_flag("--json", la.as_json, "JSON output");
    loc->add_flag("--naive-vocc", la.naive_vocc,
                  "expand occurrences through raw edges");

    ApplyArgs aa;
    auto* apply = app.add_subcommand("apply", "run an op script");
    apply->add_option("--index", aa.index_path, "index file")->required();
    apply->add_option("--ops", aa.ops_path, "op script")->required();
    apply->add_option("--verify-against", aa.verify_against,
                      "reference text checked after every op");
    apply->add_flag("--raw", aa.raw, "payloads are literal bytes, not hex");
    apply->add_flag("--json", aa.as_json, "JSON output for queries");

    StatsArgs sa;
    auto* stats = app.add_subcommand("stats", "print index statistics");
    stats->add_option("--index", sa.index_path, "index file")->required();
    stats->add_option("--delta-limit", sa.delta_limit,
                      "max n for the substring complexity scan");

    std::string verify_path;
    auto* verify = app.add_subcommand("verify", "check every index invariant");
    verify->add_option("--index", verify_path, "index file")->required();

    ExtractArgs ea;
    auto* extract_cmd = app.add_subcommand("extract", "print a substring");
    extract_cmd->add_option("--index", ea.index_path, "index file")->required();
    extract_cmd->add_option("--pos", ea.pos, "1-based start")->required();
    extract_cmd->add_option("--len", ea.len, "length")->required();
    extract_cmd->add_flag("--raw", ea.raw, "print bytes instead of hex");

    BenchArgs bna;
    auto* bench = app.add_subcommand("bench", "time locate and edits, CSV");
    bench->add_option("--index", bna.index_path, "index file")->required();
    bench->add_option("--m", bna.lens, "pattern and edit lengths")
        ->delimiter(',');
    bench->add_option("--repeats", bna.repeats, "timed repetitions");
    bench->add_option("--warmup", bna.warmup, "untimed lead-in repetitions");
    auto* bseed = bench->add_option("--bench-seed", bna.rng_seed,
                                    "position and pattern RNG seed");

    try {
        app.parse(argc, argv);
        ba.seed_given = seed_opt->count() > 0;
        bna.seed_given = bseed->count() > 0;
        if (*build) return run_build(ba);
        if (*loc) {
            if (la.pattern_file.empty() && pat->count() == 0)
                throw CLI::RequiredError("--pattern or --pattern-file");
            return run_locate(la);
        }
        if (*apply) return run_apply(aa);
        if (*stats) return run_stats(sa);
        if (*verify) return run_verify(verify_path);
        if (*extract_cmd) return run_extract(ea);
        if (*bench) return run_bench(bna);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return 4;
    } catch (const HeightBoundError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
