// protocol.hpp
// Seeded Monte Carlo execution of the two key-distribution protocols:
// round sampling from a device correlation, sifting into key / J3-test /
// S-test rounds, estimation, the accept test, and Toeplitz privacy
// amplification. Per-round randomness is addressed by (seed, round), so
// serial and parallel execution produce bit-identical outcomes.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "synqkd/bell.hpp"
#include "synqkd/correlations.hpp"
#include "synqkd/rng.hpp"

namespace synqkd {

// An estimate's conditioning cell received no samples.
class EstimationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ProtocolVariant { A, B };
enum class RoundRole : std::uint8_t { key, j3_test, s_test };
enum class Verdict { accepted, aborted };

inline const char* to_string(RoundRole r) {
    switch (r) {
        case RoundRole::key: return "key";
        case RoundRole::j3_test: return "j3_test";
        case RoundRole::s_test: return "s_test";
    }
    return "?";
}

inline const char* to_string(Verdict v) {
    return v == Verdict::accepted ? "accepted" : "aborted";
}

inline const char* to_string(ProtocolVariant v) { return v == ProtocolVariant::A ? "A" : "B"; }

struct ProtocolConfig {
    ProtocolVariant variant = ProtocolVariant::A;
    std::uint64_t n = 0;
    std::uint64_t m = 0;   // sacrifice period, variant B only
    double lambda = 0.01;  // |J3_hat + 1/8| tolerance
    double mu = 0.01;      // S_hat tolerance, variant B only
    std::uint64_t seed = 0;
    std::array<double, 3> input_distribution = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    bool abort_on_key_mismatch = false;
    unsigned threads = 1;

    void validate() const {
        if (n < 1) throw std::invalid_argument("ProtocolConfig: n must be >= 1");
        if (variant == ProtocolVariant::B && m < 2)
            throw std::invalid_argument("ProtocolConfig: m must be >= 2 for protocol B");
        if (!(lambda >= 0.0 && lambda <= 0.125))
            throw std::invalid_argument("ProtocolConfig: lambda must lie in [0, 1/8]");
        if (variant == ProtocolVariant::B && !(mu >= 0.0))
            throw std::invalid_argument("ProtocolConfig: mu must be >= 0");
        double total = 0.0;
        for (double w : input_distribution) {
            if (!(w >= 0.0)) throw std::invalid_argument("ProtocolConfig: negative input probability");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("ProtocolConfig: input probabilities must sum to 1");
    }
};

// Samples (yA,yB) given (xA,xB) from a correlation table. Outcomes of
// exactly zero probability are never produced; a synchronous table can
// therefore never emit yA != yB on equal bases.
class Device {
  public:
    explicit Device(Correlation table, double tol = 1e-9) : table_(table) {
        if (!table_.is_valid(tol))
            throw std::invalid_argument("Device: correlation table fails validation");
        for (int xa = 0; xa < 3; ++xa)
            for (int xb = 0; xb < 3; ++xb) {
                const int cell = xa * 3 + xb;
                double cum = 0.0;
                last_support_[cell] = 0;
                for (int k = 0; k < 4; ++k) {
                    const double w = std::max(table_(k >> 1, k & 1, xa, xb), 0.0);
                    if (w > 0.0) last_support_[cell] = k;
                    cum += w;
                    cdf_[cell][k] = cum;
                }
            }
    }

    std::pair<int, int> sample(int xa, int xb, double u) const {
        const int cell = xa * 3 + xb;
        const double scaled = u * cdf_[cell][3];
        int k = last_support_[cell];
        for (int i = 0; i < 4; ++i)
            if (scaled < cdf_[cell][i]) {
                k = i;
                break;
            }
        return {k >> 1, k & 1};
    }

    const Correlation& table() const { return table_; }

  private:
    Correlation table_;
    std::array<std::array<double, 4>, 9> cdf_{};
    std::array<int, 9> last_support_{};
};

struct RoundRecord {
    std::uint64_t i = 0;  // 1-based round index
    std::uint8_t xa = 0, xb = 0, ya = 0, yb = 0;
    RoundRole role = RoundRole::key;
};

// Sifting rule shared by both variants: crossed bases test J3; equal
// bases are key rounds except every m-th round of variant B, which is
// sacrificed to estimate S.
inline RoundRole sift_role(ProtocolVariant variant, std::uint64_t i, std::uint64_t m, int xa,
                           int xb) {
    if (xa != xb) return RoundRole::j3_test;
    if (variant == ProtocolVariant::B && i % m == 0) return RoundRole::s_test;
    return RoundRole::key;
}

struct SiftPartition {
    std::vector<RoundRecord> key, j3_test, s_test;
};

inline SiftPartition sift(std::span<const RoundRecord> records, ProtocolVariant variant,
                          std::uint64_t m = 0) {
    if (variant == ProtocolVariant::B && m < 2)
        throw std::invalid_argument("sift: m must be >= 2 for protocol B");
    SiftPartition out;
    for (RoundRecord r : records) {
        r.role = sift_role(variant, r.i, m, r.xa, r.xb);
        switch (r.role) {
            case RoundRole::key: out.key.push_back(r); break;
            case RoundRole::j3_test: out.j3_test.push_back(r); break;
            case RoundRole::s_test: out.s_test.push_back(r); break;
        }
    }
    return out;
}

namespace detail {

// Counts feeding the J3 estimator: per ordered crossed pair, total rounds
// and rounds with yA != yB.
struct J3Counts {
    std::array<std::uint64_t, 9> total{};
    std::array<std::uint64_t, 9> anti{};

    void add(int xa, int xb, int ya, int yb) {
        const int cell = xa * 3 + xb;
        ++total[cell];
        if (ya != yb) ++anti[cell];
    }
    void merge(const J3Counts& o) {
        for (int i = 0; i < 9; ++i) {
            total[i] += o.total[i];
            anti[i] += o.anti[i];
        }
    }
};

struct SCounts {
    std::array<std::uint64_t, 3> total{};
    std::array<std::uint64_t, 3> anti{};

    void add(int x, int ya, int yb) {
        ++total[x];
        if (ya != yb) ++anti[x];
    }
    void merge(const SCounts& o) {
        for (int i = 0; i < 3; ++i) {
            total[i] += o.total[i];
            anti[i] += o.anti[i];
        }
    }
};

inline constexpr std::array<std::pair<int, int>, 6> crossed_pairs = {
    {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}};

inline double j3_from_counts(const J3Counts& c) {
    double sum = 0.0;
    for (const auto& [xa, xb] : crossed_pairs) {
        const int cell = xa * 3 + xb;
        if (c.total[cell] == 0)
            throw EstimationError("J3 estimation undefined: no samples for input pair (" +
                                  std::to_string(xa) + "," + std::to_string(xb) +
                                  "); increase the round count n");
        sum += static_cast<double>(c.anti[cell]) / static_cast<double>(c.total[cell]);
    }
    return 1.0 - sum / 4.0;
}

inline double s_from_counts(const SCounts& c) {
    double s = 0.0;
    for (int x = 0; x < 3; ++x) {
        if (c.total[x] == 0)
            throw EstimationError("S estimation undefined: no sacrificed rounds with basis " +
                                  std::to_string(x) + "; increase n or decrease m");
        s += static_cast<double>(c.anti[x]) / static_cast<double>(c.total[x]);
    }
    return s / 3.0;
}

}  // namespace detail

// Plug-in estimate of the effective J3 from crossed-basis records; each
// conditional frequency is reweighted by its own pair count, so any input
// distribution yields an unbiased estimate.
inline double estimate_j3(std::span<const RoundRecord> j3_records) {
    detail::J3Counts c;
    for (const auto& r : j3_records) {
        if (r.xa == r.xb) continue;  // not a crossed-basis record
        c.add(r.xa, r.xb, r.ya, r.yb);
    }
    return detail::j3_from_counts(c);
}

// Mean over bases of the mismatch fraction among sacrificed rounds.
inline double estimate_s(std::span<const RoundRecord> s_records) {
    detail::SCounts c;
    for (const auto& r : s_records) {
        if (r.xa != r.xb) continue;
        c.add(r.xa, r.ya, r.yb);
    }
    return detail::s_from_counts(c);
}

inline Verdict accept(double j3_hat, std::optional<double> s_hat, const ProtocolConfig& cfg) {
    if (std::abs(j3_hat + 0.125) > cfg.lambda) return Verdict::aborted;
    if (cfg.variant == ProtocolVariant::B) {
        if (!s_hat.has_value()) throw std::invalid_argument("accept: protocol B requires an S estimate");
        if (*s_hat > cfg.mu) return Verdict::aborted;
    }
    return Verdict::accepted;
}

struct ProtocolOutcome {
    ProtocolConfig config;
    std::vector<std::uint8_t> raw_key;  // yA of each key round, in round order
    double j3_hat = 0.0;
    std::optional<double> s_hat;
    std::uint64_t key_rounds = 0, j3_rounds = 0, s_rounds = 0;
    std::uint64_t key_mismatches = 0;
    std::array<std::uint64_t, 36> counts{};  // all rounds, Correlation::index order
    Verdict verdict = Verdict::aborted;
    std::vector<RoundRecord> transcript;
};

namespace detail {

inline int pick_from_distribution(const std::array<double, 3>& w, double u) {
    double cum = 0.0;
    for (int x = 0; x < 2; ++x) {
        cum += w[x];
        if (u < cum) return x;
    }
    return 2;
}

struct ChunkResult {
    std::vector<RoundRecord> transcript;
    std::vector<std::uint8_t> key_bits;
    std::array<std::uint64_t, 36> counts{};
    J3Counts j3;
    SCounts s;
    std::uint64_t key_mismatches = 0;
};

inline void run_rounds(const ProtocolConfig& cfg, const Device& dev, std::uint64_t begin,
                       std::uint64_t end, ChunkResult& out) {
    out.transcript.reserve(end - begin);
    for (std::uint64_t i = begin; i < end; ++i) {
        const std::uint64_t base = 3 * (i - 1);
        const int xa = pick_from_distribution(cfg.input_distribution,
                                              unit_double(stream_at(cfg.seed, base)));
        const int xb = pick_from_distribution(cfg.input_distribution,
                                              unit_double(stream_at(cfg.seed, base + 1)));
        const auto [ya, yb] = dev.sample(xa, xb, unit_double(stream_at(cfg.seed, base + 2)));
        const RoundRole role = sift_role(cfg.variant, i, cfg.m, xa, xb);

        ++out.counts[Correlation::index(ya, yb, xa, xb)];
        switch (role) {
            case RoundRole::key:
                out.key_bits.push_back(static_cast<std::uint8_t>(ya));
                if (ya != yb) ++out.key_mismatches;
                break;
            case RoundRole::j3_test: out.j3.add(xa, xb, ya, yb); break;
            case RoundRole::s_test: out.s.add(xa, ya, yb); break;
        }
        out.transcript.push_back({i, static_cast<std::uint8_t>(xa), static_cast<std::uint8_t>(xb),
                                  static_cast<std::uint8_t>(ya), static_cast<std::uint8_t>(yb),
                                  role});
    }
}

}  // namespace detail

// Runs cfg.n rounds against the device and applies the accept test.
// Identical (config, device) pairs produce bit-identical outcomes
// regardless of cfg.threads.
inline ProtocolOutcome run_protocol(const ProtocolConfig& cfg, const Device& dev) {
    cfg.validate();
    const unsigned threads = std::max(1u, cfg.threads);

    std::vector<detail::ChunkResult> chunks(threads);
    if (threads == 1) {
        detail::run_rounds(cfg, dev, 1, cfg.n + 1, chunks[0]);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t per = cfg.n / threads;
        std::uint64_t begin = 1;
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t end = (t + 1 == threads) ? cfg.n + 1 : begin + per;
            pool.emplace_back(detail::run_rounds, std::cref(cfg), std::cref(dev), begin, end,
                              std::ref(chunks[t]));
            begin = end;
        }
        for (auto& th : pool) th.join();
    }

    ProtocolOutcome out;
    out.config = cfg;
    detail::J3Counts j3c;
    detail::SCounts sc;
    for (auto& ch : chunks) {
        out.transcript.insert(out.transcript.end(), ch.transcript.begin(), ch.transcript.end());
        out.raw_key.insert(out.raw_key.end(), ch.key_bits.begin(), ch.key_bits.end());
        for (int k = 0; k < 36; ++k) out.counts[k] += ch.counts[k];
        j3c.merge(ch.j3);
        sc.merge(ch.s);
        out.key_mismatches += ch.key_mismatches;
    }
    for (int i = 0; i < 9; ++i) out.j3_rounds += j3c.total[i];
    for (int i = 0; i < 3; ++i) out.s_rounds += sc.total[i];
    out.key_rounds = out.raw_key.size();

    out.j3_hat = detail::j3_from_counts(j3c);
    if (cfg.variant == ProtocolVariant::B) out.s_hat = detail::s_from_counts(sc);
    out.verdict = accept(out.j3_hat, out.s_hat, cfg);
    if (cfg.abort_on_key_mismatch && out.key_mismatches > 0) out.verdict = Verdict::aborted;
    return out;
}

// Two-universal hash of the raw key by a seeded random binary Toeplitz
// matrix; diagonal k of the matrix carries bit k of the seeded stream.
inline std::vector<std::uint8_t> privacy_amplify(std::span<const std::uint8_t> raw_key,
                                                 std::size_t out_len, std::uint64_t seed) {
    const std::size_t in_len = raw_key.size();
    if (out_len > in_len)
        throw std::invalid_argument("privacy_amplify: output longer than raw key");
    if (out_len == 0) return {};

    const std::size_t diag_bits = out_len + in_len - 1;
    std::vector<std::uint64_t> words((diag_bits + 63) / 64);
    SplitMix64 rng(seed);
    for (auto& w : words) w = rng.next();
    const auto diag = [&](std::size_t k) -> int {
        return static_cast<int>((words[k / 64] >> (k % 64)) & 1u);
    };

    std::vector<std::uint8_t> out(out_len);
    for (std::size_t j = 0; j < out_len; ++j) {
        int parity = 0;
        for (std::size_t i = 0; i < in_len; ++i)
            parity ^= diag(j + i) & static_cast<int>(raw_key[i] & 1u);
        out[j] = static_cast<std::uint8_t>(parity);
    }
    return out;
}

}  // namespace synqkd
