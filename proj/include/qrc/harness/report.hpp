// Copyright 2026 The qrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reading results.csv back, disorder averages, rank correlations and the
// summary tables per quantity.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "qrc/harness/sweep.hpp"

namespace qrc::harness {

class SchemaError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// CSV input

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline double parse_number(const std::string& s) {
    if (s.empty()) return std::nan("");
    if (s == "inf") return kInfiniteFrequency;
    if (s == "-inf") return -kInfiniteFrequency;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw SchemaError("malformed number '" + s + "'");
    return v;
}

/// Parses a results.csv written by run_sweep with the same schema version.
inline std::vector<SweepRecord> read_results(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw SchemaError("results file is empty");
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    std::vector<std::string> missing;
    for (const auto& c : csv_columns())
        if (!col.count(c)) missing.push_back(c);
    if (!missing.empty()) {
        std::string msg = "results file lacks columns:";
        for (const auto& m : missing) msg += " " + m;
        throw SchemaError(msg);
    }
    std::vector<SweepRecord> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) throw SchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " fields");
        auto get = [&](const char* name) -> const std::string& { return f[col.at(name)]; };
        try {
            if (std::stoi(get("schema_version")) != kSchemaVersion)
                throw SchemaError("line " + std::to_string(line_no) + ": schema_version " + get("schema_version") + " not supported");
            SweepRecord r;
            r.j_s = parse_number(get("j_s"));
            r.gamma = parse_number(get("gamma"));
            r.frequency = parse_number(get("f"));
            r.realization = std::stoi(get("realization"));
            r.coupling_seed = std::stoull(get("coupling_seed"));
            r.input_seed = std::stoull(get("input_seed"));
            r.task = parse_task_kind(get("task"));
            r.ok = get("status") == "ok";
            r.error = get("error");
            r.total = parse_number(get("total"));
            r.tau_max = get("tau_max").empty() ? -1 : std::stoi(get("tau_max"));
            for (int t = 0; t < kCapacityColumns; ++t) {
                const auto& v = f[col.at("c" + std::to_string(t))];
                if (!v.empty()) r.capacity[t] = parse_number(v);
            }
            // lambdas are listed in the order of the filled capacity columns
            std::istringstream ls(get("lambdas"));
            auto order = r.capacity.begin();
            for (std::string tok; std::getline(ls, tok, ';');) {
                if (order == r.capacity.end()) throw SchemaError("line " + std::to_string(line_no) + ": more lambdas than capacities");
                r.lambda[(order++)->first] = parse_number(tok);
            }
            r.en = parse_number(get("en"));
            r.en_all = parse_number(get("en_all"));
            r.en_single = parse_number(get("en_single"));
            r.cov_dim = parse_number(get("cov_dim"));
            r.stationary_rate = parse_number(get("stationary_rate"));
            r.runtime = parse_number(get("runtime_s"));
            out.push_back(std::move(r));
        } catch (const SchemaError&) {
            throw;
        } catch (const std::exception& e) {
            throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<SweepRecord> read_results(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot read " + path);
    return read_results(is);
}

// ---------------------------------------------------------------------------
// Statistics

struct MeanSe {
    double mean = std::nan("");
    double se = std::nan("");
    int n = 0;
};

/// Mean and standard error (sample sd / sqrt n) of the finite entries.
inline MeanSe mean_se(const std::vector<double>& v) {
    MeanSe out;
    double sum = 0.0;
    for (double x : v)
        if (std::isfinite(x)) {
            sum += x;
            ++out.n;
        }
    if (out.n == 0) return out;
    out.mean = sum / out.n;
    if (out.n < 2) {
        out.se = 0.0;
        return out;
    }
    double ss = 0.0;
    for (double x : v)
        if (std::isfinite(x)) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (out.n - 1)) / std::sqrt(static_cast<double>(out.n));
    return out;
}

/// Ranks starting at 1, ties share their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    return rank;
}

/// Spearman rank correlation (Pearson correlation of average ranks). NaN when
/// fewer than 3 pairs or either side is constant.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidSpecError("spearman: length mismatch");
    std::vector<double> a, b;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::isfinite(x[i]) && std::isfinite(y[i])) {
            a.push_back(x[i]);
            b.push_back(y[i]);
        }
    if (a.size() < 3) return std::nan("");
    const auto ra = average_ranks(a), rb = average_ranks(b);
    const double n = static_cast<double>(ra.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n, mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return std::nan("");
    return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------
// Disorder averages

struct CurveKey {
    TaskKind task;
    double gamma;
    double frequency;
    auto operator<=>(const CurveKey&) const = default;
};

/// Disorder-averaged quantities at one J_s of one (task, gamma, f) curve.
struct CurvePoint {
    double j_s = 0.0;
    MeanSe total, en, en_all, en_single, cov_dim, rescaled;
    int failed = 0;
};

using Curves = std::map<CurveKey, std::vector<CurvePoint>>;

/// Rescaling factor of the capacity axis by input frequency. Finite f scales
/// by f; random input (f = inf) by f_ref times the ratio of stationary-point
/// rates of the random and the f_ref series.
inline double frequency_scale(double f, double random_rate, double ref_rate, double f_ref = 5.0) {
    if (std::isfinite(f)) return f;
    if (!(ref_rate > 0.0)) return std::nan("");
    return f_ref * random_rate / ref_rate;
}

struct RescaleRates {
    double random_rate = std::nan("");
    double ref_rate = std::nan("");
};

/// Mean stationary-point rates of the random (f = inf) and f = 5 test inputs.
inline RescaleRates rescale_rates(const std::vector<SweepRecord>& rows, double f_ref = 5.0) {
    std::vector<double> rnd, ref;
    for (const auto& r : rows) {
        if (std::isinf(r.frequency)) rnd.push_back(r.stationary_rate);
        if (r.frequency == f_ref) ref.push_back(r.stationary_rate);
    }
    return {mean_se(rnd).mean, mean_se(ref).mean};
}

/// Capacity multiplied by the frequency scale, per row.
inline std::vector<double> rescale_capacity_by_frequency(const std::vector<SweepRecord>& rows, double f_ref = 5.0) {
    const auto rates = rescale_rates(rows, f_ref);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.total * frequency_scale(r.frequency, rates.random_rate, rates.ref_rate, f_ref));
    return out;
}

inline Curves aggregate(const std::vector<SweepRecord>& rows) {
    const auto rescaled = rescale_capacity_by_frequency(rows);
    struct Acc {
        std::vector<double> total, en, en_all, en_single, cov_dim, rescaled;
        int failed = 0;
    };
    std::map<CurveKey, std::map<double, Acc>> acc;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        auto& a = acc[{r.task, r.gamma, r.frequency}][r.j_s];
        if (!r.ok) {
            ++a.failed;
            continue;
        }
        a.total.push_back(r.total);
        a.en.push_back(r.en);
        a.en_all.push_back(r.en_all);
        a.en_single.push_back(r.en_single);
        a.cov_dim.push_back(r.cov_dim);
        a.rescaled.push_back(rescaled[i]);
    }
    Curves out;
    for (const auto& [key, by_js] : acc)
        for (const auto& [js, a] : by_js)
            out[key].push_back({js, mean_se(a.total), mean_se(a.en), mean_se(a.en_all), mean_se(a.en_single), mean_se(a.cov_dim),
                                mean_se(a.rescaled), a.failed});
    return out;
}

template <typename F>
std::vector<double> column(const std::vector<CurvePoint>& c, F f) {
    std::vector<double> out;
    for (const auto& p : c) out.push_back(f(p));
    return out;
}

/// J_s of the largest mean negativity on a curve (first on ties).
inline double argmax_negativity(const std::vector<CurvePoint>& c) {
    double best = -1.0, at = std::nan("");
    for (const auto& p : c)
        if (std::isfinite(p.en.mean) && p.en.mean > best) {
            best = p.en.mean;
            at = p.j_s;
        }
    return at;
}

// ---------------------------------------------------------------------------
// Report

inline std::string fmt_f(double f) { return std::isinf(f) ? "inf" : detail::fmt(f); }

/// summary.csv: one row per (task, gamma, f, J_s) with means and standard errors.
inline void write_summary_csv(const Curves& curves, std::ostream& os) {
    os << "task,gamma,f,j_s,n,failed,total_mean,total_se,en_mean,en_se,en_all_mean,en_all_se,en_single_mean,en_single_se,"
          "cov_dim_mean,cov_dim_se,rescaled_mean,rescaled_se\n";
    for (const auto& [k, c] : curves)
        for (const auto& p : c) {
            os << to_string(k.task) << ',' << detail::fmt(k.gamma) << ',' << fmt_f(k.frequency) << ',' << detail::fmt(p.j_s) << ','
               << p.total.n << ',' << p.failed;
            for (const auto* m : {&p.total, &p.en, &p.en_all, &p.en_single, &p.cov_dim, &p.rescaled})
                os << ',' << detail::fmt(m->mean) << ',' << detail::fmt(m->se);
            os << '\n';
        }
}

/// correlations.csv: per curve, rank correlations over the J_s grid.
inline void write_correlations_csv(const Curves& curves, std::ostream& os) {
    os << "task,gamma,f,points,rho_capacity_en,rho_capacity_dim,argmax_en_js\n";
    for (const auto& [k, c] : curves) {
        const auto cap = column(c, [](const CurvePoint& p) { return p.total.mean; });
        const auto en = column(c, [](const CurvePoint& p) { return p.en.mean; });
        const auto dim = column(c, [](const CurvePoint& p) { return p.cov_dim.mean; });
        os << to_string(k.task) << ',' << detail::fmt(k.gamma) << ',' << fmt_f(k.frequency) << ',' << c.size() << ','
           << detail::fmt(spearman(cap, en)) << ',' << detail::fmt(spearman(dim, cap)) << ',' << detail::fmt(argmax_negativity(c)) << '\n';
    }
}

/// Human-readable tables, one per quantity.
inline void write_text_report(const Curves& curves, std::ostream& os, double transition_lo = 2.0, double transition_hi = 10.0) {
    auto table = [&](const std::string& title, TaskKind task, auto filter, const std::string& value_name, auto value) {
        os << "== " << title << " ==\n";
        bool any = false;
        for (const auto& [k, c] : curves) {
            if (k.task != task || !filter(k)) continue;
            any = true;
            os << "  gamma=" << detail::fmt(k.gamma) << " f=" << fmt_f(k.frequency) << "  (argmax E_N at J_s=" << detail::fmt(argmax_negativity(c))
               << ")\n";
            os << "    J_s            " << value_name << "             se\n";
            for (const auto& p : c) {
                const MeanSe m = value(p);
                char buf[128];
                std::snprintf(buf, sizeof buf, "    %-14.6g %-16.6g %-12.4g%s\n", p.j_s, m.mean, m.se,
                              p.j_s >= transition_lo && p.j_s <= transition_hi ? "  [transition]" : "");
                os << buf;
            }
        }
        if (!any) os << "  (no data)\n";
        os << '\n';
    };
    auto all = [](const CurveKey&) { return true; };
    auto by_en = [](const CurvePoint& p) { return p.en; };
    auto by_cap = [](const CurvePoint& p) { return p.total; };
    auto by_dim = [](const CurvePoint& p) { return p.cov_dim; };
    auto by_rescaled = [](const CurvePoint& p) { return p.rescaled; };

    table("mean log-negativity vs J_s", TaskKind::delay, all, "E_N      ", by_en);
    table("total memory capacity vs J_s", TaskKind::delay, all, "C_total  ", by_cap);
    table("capacity rescaled by input frequency", TaskKind::delay, all, "f*C      ", by_rescaled);
    table("covariance dimension vs J_s", TaskKind::delay, all, "dim      ", by_dim);
    table("NARMA total capacity vs J_s", TaskKind::narma, all, "C_narma  ", by_cap);

    os << "== rank correlations over J_s ==\n";
    os << "  task   gamma    f      rho(C,E_N)   rho(dim,C)\n";
    for (const auto& [k, c] : curves) {
        const auto cap = column(c, [](const CurvePoint& p) { return p.total.mean; });
        const auto en = column(c, [](const CurvePoint& p) { return p.en.mean; });
        const auto dim = column(c, [](const CurvePoint& p) { return p.cov_dim.mean; });
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-6s %-8.4g %-6s %-12.4f %-12.4f\n", std::string(to_string(k.task)).c_str(), k.gamma,
                      fmt_f(k.frequency).c_str(), spearman(cap, en), spearman(dim, cap));
        os << buf;
    }
}

}  // namespace qrc::harness
