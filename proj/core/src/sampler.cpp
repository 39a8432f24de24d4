#include "hafsim/sampler.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hafsim/hafnian.hpp"

namespace hafsim {

namespace {

void fill_patterns(int modes, int remaining, OccupationPattern& head,
                   std::vector<OccupationPattern>& out) {
    if (static_cast<int>(head.size()) == modes) {
        out.push_back(head);
        return;
    }
    for (int n = 0; n <= remaining; ++n) {
        head.push_back(n);
        fill_patterns(modes, remaining - n, head, out);
        head.pop_back();
    }
}

} // namespace

std::vector<OccupationPattern> patterns_up_to_total(int modes, int total) {
    if (modes < 1 || total < 0) {
        throw DomainError("patterns_up_to_total: need modes >= 1 and total >= 0");
    }
    std::vector<OccupationPattern> out;
    OccupationPattern head;
    fill_patterns(modes, total, head, out);
    return out;
}

double ProbabilityTable::probability(const OccupationPattern& pattern) const {
    const auto it = std::lower_bound(
        entries.begin(), entries.end(), pattern,
        [](const auto& entry, const OccupationPattern& p) { return entry.first < p; });
    if (it == entries.end() || it->first != pattern) return 0.0;
    return it->second;
}

int suggest_total_cutoff(const CovarianceMatrix& photon_cov, double tail_bound,
                         int min_cutoff) {
    const int m = photon_cov.modes();
    const Matrix full = photon_cov.full();
    const Matrix W =
        (Matrix::Identity(2 * m, 2 * m) + full).partialPivLu().solve(full);
    const double q = W.jacobiSvd().singularValues().maxCoeff();
    if (q >= 1.0) {
        throw DomainError("suggest_total_cutoff: covariance has no convergent tail");
    }

    // Mass at total k is bounded by a polynomial times q^k; walk the crude
    // bound sum_{k>c} (k+1)^{m-1} q^k down to the requested tail.
    auto tail = [&](int c) {
        double t = 0.0;
        for (int k = c + 1; k <= c + 400; ++k) {
            t += std::pow(static_cast<double>(k + 1), m - 1) * std::pow(q, k);
        }
        return t;
    };
    int cutoff = std::max(min_cutoff, 1);
    while (cutoff < 16 && tail(cutoff) > tail_bound) {
        ++cutoff;
    }
    return cutoff;
}

ProbabilityTable enumerate_distribution(const CovarianceMatrix& photon_cov,
                                        int total_cutoff) {
    const int m = photon_cov.layout.m_ph;
    if (photon_cov.layout.m_at != 0) {
        throw DomainError("enumerate_distribution: expected a photon-only covariance");
    }
    if (m > 4 || total_cutoff > 16) {
        throw SizeError("enumerate_distribution: guards are m_ph <= 4, cutoff <= 16");
    }
    if (total_cutoff < 0) {
        throw DomainError("enumerate_distribution: cutoff must be nonnegative");
    }

    ProbabilityTable table;
    table.cutoff = total_cutoff;
    double mass = 0.0;
    for (const auto& pattern : patterns_up_to_total(m, total_cutoff)) {
        const double p = pattern_probability(photon_cov, pattern);
        table.entries.emplace_back(pattern, p);
        mass += p;
    }
    if (mass > 1.0 + 1e-9) {
        std::ostringstream msg;
        msg << "enumerate_distribution: probabilities sum to " << mass;
        throw NumericalError(msg.str());
    }
    table.deficit = 1.0 - mass;
    return table;
}

std::vector<OccupationPattern> draw_samples(const ProbabilityTable& table,
                                            std::uint64_t seed, int count) {
    if (count < 0) {
        throw DomainError("draw_samples: count must be nonnegative");
    }
    if (table.deficit >= 0.01) {
        std::ostringstream msg;
        msg << "draw_samples: table deficit " << table.deficit
            << " is too large for faithful sampling";
        throw NumericalError(msg.str());
    }
    if (table.entries.empty()) {
        throw DomainError("draw_samples: empty table");
    }

    const double mass = table.total_mass();
    std::vector<double> cdf;
    cdf.reserve(table.entries.size());
    double acc = 0.0;
    for (const auto& [pattern, p] : table.entries) {
        acc += p / mass;
        cdf.push_back(acc);
    }
    cdf.back() = 1.0;

    // Raw 53-bit uniforms keep the stream identical across standard library
    // implementations; distribution adapters are not portable.
    std::mt19937_64 rng(seed);
    std::vector<OccupationPattern> samples;
    samples.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto idx = static_cast<std::size_t>(std::distance(cdf.begin(), it));
        samples.push_back(table.entries[std::min(idx, table.entries.size() - 1)].first);
    }
    return samples;
}

// ---------------------------------- I/O ------------------------------------

namespace {
using nlohmann::json;
}

void save_table(const ProbabilityTable& table, int m_ph, std::ostream& out) {
    json doc;
    doc["m_ph"] = m_ph;
    doc["cutoff"] = table.cutoff;
    doc["deficit"] = table.deficit;
    json entries = json::array();
    for (const auto& [pattern, p] : table.entries) {
        entries.push_back({{"pattern", pattern}, {"p", p}});
    }
    doc["entries"] = std::move(entries);
    out << doc.dump(2) << "\n";
}

ProbabilityTable load_table(std::istream& in, int* m_ph_out) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw IngestionError(std::string("probability table JSON: parse failure: ") + e.what());
    }
    ProbabilityTable table;
    try {
        if (m_ph_out != nullptr) {
            *m_ph_out = doc.at("m_ph").get<int>();
        }
        table.cutoff = doc.at("cutoff").get<int>();
        table.deficit = doc.at("deficit").get<double>();
        for (const auto& e : doc.at("entries")) {
            table.entries.emplace_back(e.at("pattern").get<OccupationPattern>(),
                                       e.at("p").get<double>());
        }
    } catch (const json::exception& e) {
        throw IngestionError(std::string("probability table JSON: missing field: ") + e.what());
    }
    return table;
}

void write_samples_csv(const std::vector<OccupationPattern>& samples, std::ostream& out) {
    for (const auto& pattern : samples) {
        for (std::size_t k = 0; k < pattern.size(); ++k) {
            if (k > 0) out << ',';
            out << pattern[k];
        }
        out << '\n';
    }
}

} // namespace hafsim
