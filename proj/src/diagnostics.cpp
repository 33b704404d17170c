#include "garchmc/diagnostics.hpp"

#include "garchmc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace garchmc {

namespace {

bool is_constant(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

std::vector<double> centered(std::span<const double> x) {
    const double m = mean_of(x);
    std::vector<double> c(x.size());
    std::transform(x.begin(), x.end(), c.begin(), [m](double v) { return v - m; });
    return c;
}

// sum_{j < n - t} c_j c_{j+t}
double lag_sum(const std::vector<double>& c, std::size_t t) {
    const std::size_t n = c.size() - t;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += c[j] * c[j + t];
    return s;
}

void require_nonconstant(std::span<const double> x) {
    if (is_constant(x)) throw NumericError("autocorrelation of a zero-variance series is undefined");
}

JackknifeResult finish_jackknife(double estimate, const std::vector<double>& leave_out) {
    const double b = static_cast<double>(leave_out.size());
    const double avg = std::accumulate(leave_out.begin(), leave_out.end(), 0.0) / b;
    double ss = 0.0;
    for (double v : leave_out) ss += (v - avg) * (v - avg);
    return JackknifeResult{estimate, std::sqrt((b - 1.0) / b * ss)};
}

std::vector<double> leave_out_taus(std::span<const double> x, std::size_t blocks, std::size_t len) {
    const std::size_t n = blocks * len;
    const std::size_t nz = n - len;
    const std::vector<double> c = centered(x.first(n));

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + c[i];

    struct Sub {
        bool active = true;
        double c0 = 0.0;
        double tau = 0.5;
    };
    std::vector<Sub> subs(blocks);
    std::vector<double> q(blocks);
    std::vector<double> q_prefix(blocks + 1);

    for (std::size_t t = 0; t < nz; ++t) {
        for (std::size_t k = 0; k < blocks; ++k) {
            const std::size_t lo = k * len;
            const std::size_t hi = std::min((k + 1) * len, n - t);
            double s = 0.0;
            for (std::size_t j = lo; j < hi; ++j) s += c[j] * c[j + t];
            q[k] = s;
        }
        q_prefix[0] = 0.0;
        for (std::size_t k = 0; k < blocks; ++k) q_prefix[k + 1] = q_prefix[k] + q[k];

        bool any_active = false;
        for (std::size_t b = 0; b < blocks; ++b) {
            Sub& sub = subs[b];
            if (!sub.active) continue;

            const std::size_t cut = b * len;
            const double removed = prefix[cut + len] - prefix[cut];
            auto sz = [&](std::size_t i) { return i <= cut ? prefix[i] : prefix[i + len] - removed; };

            // Pairs (j, j+t) with j in the left part whose partner falls at or past the cut
            // are dropped; the pairs that now straddle the join are added.
            double dropped = 0.0;
            double joined = 0.0;
            for (std::size_t j = cut > t ? cut - t : 0; j < cut; ++j) {
                if (j + t < n) dropped += c[j] * c[j + t];
                if (j + t + len < n) joined += c[j] * c[j + t + len];
            }
            const double raw = q_prefix[b] + (q_prefix[blocks] - q_prefix[b + 1]) - dropped + joined;

            const double m = sz(nz) / static_cast<double>(nz);
            const double linear = sz(nz - t) + (sz(nz) - sz(t));
            const double cov =
                (raw - m * linear + static_cast<double>(nz - t) * m * m) / static_cast<double>(nz);

            if (t == 0) {
                if (!(cov > 0.0)) throw NumericError("jackknife subseries has zero variance");
                sub.c0 = cov;
            } else {
                const double r = cov / sub.c0;
                if (r <= 0.0) {
                    sub.active = false;
                    continue;
                }
                sub.tau += r;
            }
            any_active = true;
        }
        if (!any_active) break;
    }

    std::vector<double> taus(blocks);
    std::transform(subs.begin(), subs.end(), taus.begin(), [](const Sub& s) { return s.tau; });
    return taus;
}

}  // namespace

AcfSeries acf(std::span<const double> x, std::size_t t_max) {
    if (x.size() <= t_max) {
        throw ValidationError("acf: series length " + std::to_string(x.size()) +
                              " must exceed the maximum lag " + std::to_string(t_max));
    }
    require_nonconstant(x);
    const std::vector<double> c = centered(x);
    const double c0 = lag_sum(c, 0);
    if (!(c0 > 0.0)) throw NumericError("autocorrelation of a zero-variance series is undefined");

    AcfSeries out;
    out.values.resize(t_max + 1);
    out.values[0] = 1.0;
    for (std::size_t t = 1; t <= t_max; ++t) out.values[t] = lag_sum(c, t) / c0;
    return out;
}

double integrated_autocorrelation_time(const AcfSeries& a) {
    double tau = 0.5;
    for (std::size_t i = 1; i < a.values.size(); ++i) {
        if (a.values[i] <= 0.0) break;
        tau += a.values[i];
    }
    return tau;
}

double integrated_autocorrelation_time(std::span<const double> x, std::size_t max_lag) {
    if (x.size() <= max_lag) {
        throw ValidationError("integrated_autocorrelation_time: series too short for max lag");
    }
    require_nonconstant(x);
    const std::vector<double> c = centered(x);
    const double c0 = lag_sum(c, 0);
    if (!(c0 > 0.0)) throw NumericError("autocorrelation of a zero-variance series is undefined");

    double tau = 0.5;
    for (std::size_t t = 1; t <= max_lag; ++t) {
        const double r = lag_sum(c, t) / c0;
        if (r <= 0.0) break;
        tau += r;
    }
    return tau;
}

JackknifeResult jackknife_error(std::span<const double> x, JackknifeStatistic statistic,
                                std::size_t blocks) {
    if (blocks < 2) throw ValidationError("jackknife: at least 2 blocks are required");
    if (x.size() < 2 * blocks) {
        throw ValidationError("jackknife: series length " + std::to_string(x.size()) +
                              " is shorter than 2 x blocks = " + std::to_string(2 * blocks));
    }
    const std::size_t len = x.size() / blocks;
    const std::size_t n = len * blocks;

    if (statistic == JackknifeStatistic::Mean) {
        std::vector<double> block_sums(blocks, 0.0);
        for (std::size_t b = 0; b < blocks; ++b) {
            for (std::size_t j = b * len; j < (b + 1) * len; ++j) block_sums[b] += x[j];
        }
        const double total = std::accumulate(block_sums.begin(), block_sums.end(), 0.0);
        std::vector<double> leave_out(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            leave_out[b] = (total - block_sums[b]) / static_cast<double>(n - len);
        }
        return finish_jackknife(mean_of(x), leave_out);
    }

    const double estimate = integrated_autocorrelation_time(x, x.size() - 1);
    return finish_jackknife(estimate, leave_out_taus(x, blocks, len));
}

bool ChainSummary::degenerate() const noexcept {
    return std::any_of(parameters.begin(), parameters.end(),
                       [](const ParameterSummary& p) { return p.degenerate; });
}

std::vector<std::string> garch_parameter_names() { return {"alpha", "beta", "omega"}; }

ChainSummary summarize(const Chain& chain, const std::vector<std::string>& names,
                       std::size_t blocks) {
    if (chain.empty()) throw ValidationError("summarize: chain is empty");
    if (names.size() != chain.dim()) throw ValidationError("summarize: one name per coordinate required");

    ChainSummary out;
    out.draws = chain.size();
    out.acceptance = chain.acceptance_rate();
    const double k = static_cast<double>(chain.size());

    for (std::size_t coord = 0; coord < chain.dim(); ++coord) {
        const std::vector<double> x = chain.column(coord);
        ParameterSummary p;
        p.name = names[coord];
        p.mean = mean_of(x);
        double ss = 0.0;
        for (double v : x) ss += (v - p.mean) * (v - p.mean);
        p.std_dev = std::sqrt(ss / k);

        if (x.size() < 2 || is_constant(x)) {
            p.std_dev = 0.0;
            p.degenerate = true;
            out.parameters.push_back(std::move(p));
            continue;
        }

        p.tau = integrated_autocorrelation_time(x, x.size() - 1);
        p.two_tau = 2.0 * *p.tau;
        p.stat_error = p.std_dev * std::sqrt(*p.two_tau / k);
        if (x.size() >= 2 * blocks) {
            try {
                p.two_tau_error = 2.0 * jackknife_error(x, JackknifeStatistic::Tau, blocks).error;
            } catch (const NumericError&) {
                // a leave-one-out subseries is constant; leave the error unset
            }
            p.mean_jackknife_error = jackknife_error(x, JackknifeStatistic::Mean, blocks).error;
        }
        out.parameters.push_back(std::move(p));
    }
    return out;
}

}  // namespace garchmc
