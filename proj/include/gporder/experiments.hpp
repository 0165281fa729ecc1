#pragma once

// Verification harness and census machinery: the main order/index comparison
// over ranges of (p, q), the exact index distribution predicted from unit
// candidates in F_q^2, the observed-census scan with checkpoint/resume and a
// deterministic parallel fold, and the Ishikawa-Kitaoka divisibility scan.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gporder/arith.hpp"
#include "gporder/cyclo.hpp"
#include "gporder/errors.hpp"
#include "gporder/quadratic.hpp"

namespace gporder::experiments {

using arith::Int;

// is_prime bitmap for 0..limit.
inline std::vector<bool> prime_sieve(std::uint64_t limit) {
    std::vector<bool> is_prime(limit + 1, true);
    is_prime[0] = false;
    if (limit >= 1) is_prime[1] = false;
    for (std::uint64_t i = 2; i * i <= limit; ++i)
        if (is_prime[i])
            for (std::uint64_t j = i * i; j <= limit; j += i) is_prime[j] = false;
    return is_prime;
}

enum class Filter { OneMod4, FiveMod8 };

inline const char* filter_name(Filter f) { return f == Filter::OneMod4 ? "1mod4" : "5mod8"; }

inline Filter parse_filter(const std::string& s) {
    if (s == "1mod4") return Filter::OneMod4;
    if (s == "5mod8") return Filter::FiveMod8;
    throw Error("unknown filter: " + s + " (expected 1mod4 or 5mod8)");
}

inline bool filter_accepts(Filter f, std::uint64_t p) {
    return f == Filter::OneMod4 ? p % 4 == 1 : p % 8 == 5;
}

// ---------------------------------------------------------------------------
// Main comparison
// ---------------------------------------------------------------------------

struct TheoremReport {
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    Int h_p;
    Int lhs;  // gcd(index of the period, q^2 - 1), computed in F_q[x]/Phi_p
    Int rhs;  // index of the h-th unit power mod q, computed in F_q^2
    bool equal = false;
};

inline TheoremReport check_main_theorem(std::uint64_t p, std::uint64_t q,
                                        std::uint64_t budget = arith::kDefaultFactorBudget) {
    if (!arith::is_prime_u64(p) || p % 8 != 5)
        throw HypothesisViolated("p must be a prime congruent to 5 mod 8");
    if (!arith::is_prime_u64(q)) throw Error("q must be prime");
    if (!arith::generated_by_minus_one_and_q(q, p))
        throw HypothesisViolated("-1 and q must generate the unit group mod p");
    TheoremReport rep;
    rep.p = p;
    rep.q = q;
    rep.lhs = cyclo::lhs_theorem(p, q, budget);
    rep.h_p = quadratic::class_number_real(static_cast<unsigned long>(p));
    rep.rhs = quadratic::rhs_theorem(static_cast<unsigned long>(p), static_cast<unsigned long>(q),
                                     rep.h_p);
    rep.equal = rep.lhs == rep.rhs;
    return rep;
}

// All valid pairs with p <= p_max (p = 5 mod 8) and q in q_set; pairs whose
// hypothesis fails are skipped silently.  `progress` (if given) sees every
// report as it is produced.
inline std::vector<TheoremReport> check_theorem_range(
    std::uint64_t p_max, const std::vector<std::uint64_t>& q_set,
    const std::function<void(const TheoremReport&)>& progress = {},
    std::uint64_t budget = arith::kDefaultFactorBudget) {
    std::vector<TheoremReport> out;
    auto is_prime = prime_sieve(p_max);
    for (std::uint64_t p = 5; p <= p_max; p += 8) {
        if (!is_prime[p]) continue;
        for (std::uint64_t q : q_set) {
            if (!arith::is_prime_u64(q)) throw Error("q must be prime");
            if (q % p == 0 || !arith::generated_by_minus_one_and_q(q, p)) continue;
            out.push_back(check_main_theorem(p, q, budget));
            if (progress) progress(out.back());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Predicted index distribution
// ---------------------------------------------------------------------------

// Exact distribution of the index over all unit candidates: for each
// non-residue class pbar mod q (pbar = 5 for q = 2), enumerate the elements
// a + bX of F_q[X]/(X^2 - X + (1-pbar)/4) whose coordinates solve
// (2a+b)^2 - pbar b^2 = -4, and tally the index of each candidate.
inline std::map<std::uint64_t, mpq_class> predict_distribution(std::uint64_t q) {
    if (!arith::is_prime_u64(q)) throw Error("q must be prime");
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t total = 0;
    auto tally = [&](const quadratic::QuadElem& e) {
        Int idx = quadratic::quad_index(e, static_cast<unsigned long>(e.ring.m));
        ++counts[idx.get_ui()];
        ++total;
    };
    if (q == 2) {
        auto ring = quadratic::quad_ring(2, 5);
        for (std::uint64_t a = 0; a < 2; ++a)
            for (std::uint64_t b = 0; b < 2; ++b)
                if (a || b) tally(quadratic::quad_elem(ring, a, b));
    } else {
        for (std::uint64_t pbar = 1; pbar < q; ++pbar) {
            if (arith::jacobi(static_cast<std::int64_t>(pbar), static_cast<std::int64_t>(q)) != -1)
                continue;
            auto ring = quadratic::quad_ring(q, pbar);
            const std::uint64_t target = (q - 4 % q) % q;  // -4 mod q
            for (std::uint64_t a = 0; a < q; ++a) {
                for (std::uint64_t b = 0; b < q; ++b) {
                    if (!a && !b) continue;
                    std::uint64_t x = (2 * a + b) % q;
                    std::uint64_t norm4 = (arith::mulmod_u64(x, x, q) + q -
                                           arith::mulmod_u64(pbar, arith::mulmod_u64(b, b, q), q)) %
                                          q;
                    if (norm4 != target) continue;
                    tally(quadratic::quad_elem(ring, a, b));
                }
            }
        }
    }
    std::map<std::uint64_t, mpq_class> out;
    for (const auto& [idx, c] : counts) {
        mpq_class frac(static_cast<unsigned long>(c), static_cast<unsigned long>(total));
        frac.canonicalize();
        out[idx] = frac;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Observed census scan
// ---------------------------------------------------------------------------

struct ScanRecord {
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    std::uint64_t index_unit = 0;
    unsigned p_mod_8 = 0;

    bool operator==(const ScanRecord&) const = default;
};

struct FrequencyTable {
    std::uint64_t q = 0;
    std::uint64_t range_max = 0;
    Filter filter = Filter::OneMod4;
    std::map<std::uint64_t, std::uint64_t> counts;
    std::map<std::uint64_t, double> fractions;
};

struct ScanResult {
    FrequencyTable table;
    std::vector<ScanRecord> records;
};

inline std::string scan_csv(const std::vector<ScanRecord>& records) {
    std::string out = "p,q,index_unit,p_mod_8\n";
    for (const auto& r : records) {
        out += std::to_string(r.p);
        out += ',';
        out += std::to_string(r.q);
        out += ',';
        out += std::to_string(r.index_unit);
        out += ',';
        out += std::to_string(r.p_mod_8);
        out += '\n';
    }
    return out;
}

namespace detail {

constexpr std::uint64_t kChunkWidth = 32768;     // fixed so results ignore --jobs
constexpr std::uint64_t kFlushEvery = 10000;     // records between checkpoint markers
inline const char* kCsvHeader = "p,q,index_unit,p_mod_8";

inline std::string scan_metadata(std::uint64_t q, std::uint64_t p_max, Filter filter) {
    std::ostringstream os;
    os << "# scan q=" << q << " p_max=" << p_max << " filter=" << filter_name(filter)
       << " version=1";
    return os.str();
}

// Scan one integer range [lo, hi] (inclusive) against a shared sieve.
inline std::vector<ScanRecord> scan_chunk(std::uint64_t q, std::uint64_t lo, std::uint64_t hi,
                                          Filter filter, const std::vector<bool>& is_prime) {
    std::vector<ScanRecord> out;
    for (std::uint64_t p = lo; p <= hi; ++p) {
        if (p < 5 || p == q || !is_prime[p]) continue;
        if (!filter_accepts(filter, p)) continue;
        if (!quadratic::is_inert(static_cast<unsigned long>(p), static_cast<unsigned long>(q)))
            continue;
        auto unit = quadratic::unit_mod_q(static_cast<unsigned long>(p),
                                          static_cast<unsigned long>(q));
        Int idx = quadratic::quad_index(unit, static_cast<unsigned long>(q));
        out.push_back({p, q, idx.get_ui(), static_cast<unsigned>(p % 8)});
    }
    return out;
}

struct CheckpointState {
    std::vector<ScanRecord> committed;
    std::uint64_t last_completed = 0;
};

inline ScanRecord parse_row(const std::string& line, std::uint64_t q) {
    ScanRecord r;
    char c1, c2, c3;
    std::istringstream is(line);
    if (!(is >> r.p >> c1 >> r.q >> c2 >> r.index_unit >> c3 >> r.p_mod_8) || c1 != ',' ||
        c2 != ',' || c3 != ',' || !is.eof())
        throw CheckpointCorrupt("unparseable checkpoint row: " + line);
    if (r.q != q) throw CheckpointCorrupt("checkpoint row for a different q: " + line);
    if (r.p_mod_8 != r.p % 8) throw CheckpointCorrupt("inconsistent residue in row: " + line);
    return r;
}

// Load a checkpoint: committed rows are those preceding the final
// `last_completed_p=` marker; rows after it are presumed torn and dropped.
inline CheckpointState load_checkpoint(const std::string& path, std::uint64_t q,
                                       std::uint64_t p_max, Filter filter) {
    CheckpointState st;
    std::ifstream in(path);
    if (!in) return st;
    std::string line;
    if (!std::getline(in, line)) return st;  // empty file: start fresh
    if (line != scan_metadata(q, p_max, filter))
        throw CheckpointCorrupt("checkpoint was written for different scan parameters");
    if (!std::getline(in, line) || line != kCsvHeader)
        throw CheckpointCorrupt("checkpoint is missing the CSV header");
    std::vector<std::string> pending;
    const std::string marker = "last_completed_p=";
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind(marker, 0) == 0) {
            std::uint64_t value = 0;
            try {
                value = std::stoull(line.substr(marker.size()));
            } catch (...) {
                break;  // torn marker: everything from here on is discarded
            }
            if (value < st.last_completed)
                throw CheckpointCorrupt("checkpoint markers are not monotone");
            for (const auto& row : pending) {
                ScanRecord r = parse_row(row, q);
                if (r.p > value) throw CheckpointCorrupt("row beyond its completion marker");
                if (!st.committed.empty() && r.p <= st.committed.back().p)
                    throw CheckpointCorrupt("checkpoint rows are not in ascending order");
                st.committed.push_back(r);
            }
            pending.clear();
            st.last_completed = value;
        } else {
            pending.push_back(line);
        }
    }
    return st;  // trailing `pending` rows (no marker after them) are dropped
}

}  // namespace detail

// Census of ind(unit mod q) over primes p <= p_max passing `filter` with q
// inert.  The range is cut into fixed-width chunks processed by `jobs`
// workers and folded in chunk order, so records, counts, and fractions are
// identical for every job count.  With a checkpoint path, progress is flushed
// periodically and an interrupted scan resumes after the last marker.
inline ScanResult scan_observed(std::uint64_t q, std::uint64_t p_max, Filter filter,
                                const std::string& checkpoint_path = {}, unsigned jobs = 1,
                                const std::function<void(std::uint64_t)>& progress = {}) {
    if (!arith::is_prime_u64(q)) throw Error("q must be prime");
    if (p_max < 100) throw Error("p_max must be at least 100");
    if (jobs == 0) jobs = 1;

    detail::CheckpointState cp;
    std::ofstream out;
    if (!checkpoint_path.empty()) {
        cp = detail::load_checkpoint(checkpoint_path, q, p_max, filter);
        // Rewrite the normalized prefix (drops any torn tail), then append.
        out.open(checkpoint_path, std::ios::trunc);
        if (!out) throw Error("cannot open checkpoint file: " + checkpoint_path);
        out << detail::scan_metadata(q, p_max, filter) << '\n' << detail::kCsvHeader << '\n';
        for (const auto& r : cp.committed)
            out << r.p << ',' << r.q << ',' << r.index_unit << ',' << r.p_mod_8 << '\n';
        if (cp.last_completed > 0) out << "last_completed_p=" << cp.last_completed << '\n';
        out.flush();
    }

    ScanResult res;
    res.records = std::move(cp.committed);

    if (cp.last_completed < p_max) {
        auto is_prime = prime_sieve(p_max);
        const std::uint64_t first_chunk = cp.last_completed / detail::kChunkWidth;
        const std::uint64_t last_chunk = p_max / detail::kChunkWidth;
        std::atomic<std::uint64_t> next{first_chunk};
        std::atomic<bool> abort{false};
        std::exception_ptr err;  // first worker failure; guarded by mu
        std::map<std::uint64_t, std::vector<ScanRecord>> done;
        std::mutex mu;
        std::condition_variable cv;

        auto worker = [&] {
            for (;;) {
                if (abort.load()) return;
                std::uint64_t k = next.fetch_add(1);
                if (k > last_chunk) return;
                std::uint64_t lo = std::max(k * detail::kChunkWidth, cp.last_completed + 1);
                std::uint64_t hi = std::min((k + 1) * detail::kChunkWidth - 1, p_max);
                std::vector<ScanRecord> recs;
                try {
                    recs = detail::scan_chunk(q, lo, hi, filter, is_prime);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!err) err = std::current_exception();
                    abort.store(true);
                    cv.notify_all();
                    return;
                }
                std::lock_guard<std::mutex> lk(mu);
                done[k] = std::move(recs);
                cv.notify_all();
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);

        bool failed = false;
        std::uint64_t unflushed = 0;
        std::string buffer;
        for (std::uint64_t k = first_chunk; k <= last_chunk; ++k) {
            std::vector<ScanRecord> recs;
            {
                std::unique_lock<std::mutex> lk(mu);
                cv.wait(lk, [&] { return done.count(k) > 0 || abort.load(); });
                if (abort.load() && done.count(k) == 0) {
                    failed = true;
                    break;
                }
                recs = std::move(done[k]);
                done.erase(k);
            }
            std::uint64_t chunk_end = std::min((k + 1) * detail::kChunkWidth - 1, p_max);
            for (const auto& r : recs) {
                res.records.push_back(r);
                if (out.is_open()) {
                    buffer += std::to_string(r.p) + ',' + std::to_string(r.q) + ',' +
                              std::to_string(r.index_unit) + ',' + std::to_string(r.p_mod_8) +
                              '\n';
                    ++unflushed;
                }
            }
            if (out.is_open() && (unflushed >= detail::kFlushEvery || k == last_chunk)) {
                out << buffer << "last_completed_p=" << chunk_end << '\n';
                out.flush();
                buffer.clear();
                unflushed = 0;
            }
            if (progress) progress(chunk_end);
        }
        for (auto& t : pool) t.join();
        if (failed) std::rethrow_exception(err);
    }

    res.table.q = q;
    res.table.range_max = p_max;
    res.table.filter = filter;
    std::uint64_t total = 0;
    for (const auto& r : res.records) {
        ++res.table.counts[r.index_unit];
        ++total;
    }
    for (const auto& [idx, c] : res.table.counts)
        res.table.fractions[idx] = static_cast<double>(c) / static_cast<double>(total);
    return res;
}

// ---------------------------------------------------------------------------
// Divisibility / residue scan for unit indices at odd q
// ---------------------------------------------------------------------------

struct IkReport {
    std::uint64_t q = 0;
    std::uint64_t p_max = 0;
    bool ok = false;
    std::uint64_t pairs = 0;
    std::optional<ScanRecord> counterexample;
};

// Checks, for every prime p = 1 mod 4 up to p_max with q inert: (q-1)/2
// divides ind(unit mod q), and ord(unit mod q) = 4 mod 8 when q = 1 mod 4,
// 0 mod 8 when q = 3 mod 4.
inline IkReport ik_scan(std::uint64_t q, std::uint64_t p_max) {
    if (!arith::is_prime_u64(q) || q == 2) throw Error("q must be an odd prime");
    IkReport rep;
    rep.q = q;
    rep.p_max = p_max;
    rep.ok = true;
    auto is_prime = prime_sieve(p_max);
    const std::uint64_t half = (q - 1) / 2;
    const std::uint64_t group = q * q - 1;
    for (std::uint64_t p = 5; p <= p_max; p += 4) {
        if (!is_prime[p] || p == q) continue;
        if (!quadratic::is_inert(static_cast<unsigned long>(p), static_cast<unsigned long>(q)))
            continue;
        auto unit = quadratic::unit_mod_q(static_cast<unsigned long>(p),
                                          static_cast<unsigned long>(q));
        std::uint64_t idx =
            quadratic::quad_index(unit, static_cast<unsigned long>(q)).get_ui();
        std::uint64_t ord = group / idx;
        ++rep.pairs;
        bool good = idx % half == 0 && (q % 4 == 1 ? ord % 8 == 4 : ord % 8 == 0);
        if (!good) {
            rep.ok = false;
            rep.counterexample = ScanRecord{p, q, idx, static_cast<unsigned>(p % 8)};
            return rep;
        }
    }
    return rep;
}

}  // namespace gporder::experiments
