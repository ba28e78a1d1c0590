#include "gdp/counting.hpp"

#include "gdp/collapse.hpp"
#include "gdp/criteria.hpp"
#include "gdp/polytope.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gdp {

namespace {

constexpr int kCountStoreVersion = 1;

// Instances with at most this many variables are re-counted through full
// polytope vertex enumeration as a cross-check of the support search.
constexpr long long kCrossCheckVariables = 36;

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long value = 1;
    for (int i = 1; i <= k; ++i) value = value * (n - k + i) / i;
    return value;
}

std::string instance_label(Family family, int n, int m) {
    std::ostringstream out;
    out << family_name(family) << " n=" << n << " m=" << m;
    return out.str();
}

std::optional<CountReport> parse_count_report(std::istream& in, Family family, int n, int m) {
    std::string magic;
    if (!std::getline(in, magic)) return std::nullopt;
    std::ostringstream expected;
    expected << "gdp-count v" << kCountStoreVersion;
    if (magic != expected.str()) return std::nullopt;

    CountReport report;
    report.family = family;
    report.n = n;
    report.m = m;
    report.by_collapsed.assign(static_cast<std::size_t>(n) + 1, 0);
    report.by_collapsed_deterministic.assign(static_cast<std::size_t>(n) + 1, 0);

    bool saw_total = false;
    bool saw_deterministic = false;
    bool saw_contextual = false;
    std::size_t collapsed_lines = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string key;
        fields >> key;
        if (key == "family") {
            std::string name;
            fields >> name;
            if (fields.fail() || name != family_name(family)) return std::nullopt;
        } else if (key == "n" || key == "m") {
            int value = 0;
            fields >> value;
            if (fields.fail() || value != (key == "n" ? n : m)) return std::nullopt;
        } else if (key == "total" || key == "deterministic" || key == "contextual") {
            long long value = 0;
            fields >> value;
            if (fields.fail() || value < 0) return std::nullopt;
            if (key == "total") {
                report.total = value;
                saw_total = true;
            } else if (key == "deterministic") {
                report.deterministic = value;
                saw_deterministic = true;
            } else {
                report.contextual = value;
                saw_contextual = true;
            }
        } else if (key == "collapsed") {
            std::size_t index = 0;
            long long bucket = -1;
            long long deterministic = -1;
            fields >> index >> bucket >> deterministic;
            if (fields.fail() || index != collapsed_lines || index > static_cast<std::size_t>(n))
                return std::nullopt;
            if (bucket < 0 || deterministic < 0 || deterministic > bucket) return std::nullopt;
            report.by_collapsed[index] = bucket;
            report.by_collapsed_deterministic[index] = deterministic;
            ++collapsed_lines;
        } else {
            return std::nullopt;
        }
    }

    if (!saw_total || !saw_deterministic || !saw_contextual) return std::nullopt;
    if (collapsed_lines != report.by_collapsed.size()) return std::nullopt;
    if (report.total != report.deterministic + report.contextual) return std::nullopt;
    long long bucket_sum = 0;
    long long deterministic_sum = 0;
    for (std::size_t k = 0; k < report.by_collapsed.size(); ++k) {
        bucket_sum += report.by_collapsed[k];
        deterministic_sum += report.by_collapsed_deterministic[k];
    }
    if (bucket_sum != report.total || deterministic_sum != report.deterministic)
        return std::nullopt;

    report.text = format_count_report(report);
    return report;
}

}  // namespace

std::string family_name(Family family) {
    return family == Family::Rose ? "rose" : "dipole";
}

std::string format_count_report(const CountReport& report) {
    std::ostringstream out;
    out << "gdp-count v" << kCountStoreVersion << "\n";
    out << "family " << family_name(report.family) << "\n";
    out << "n " << report.n << "\n";
    out << "m " << report.m << "\n";
    out << "total " << report.total << "\n";
    out << "deterministic " << report.deterministic << "\n";
    out << "contextual " << report.contextual << "\n";
    for (std::size_t k = 0; k < report.by_collapsed.size(); ++k)
        out << "collapsed " << k << " " << report.by_collapsed[k] << " "
            << report.by_collapsed_deterministic[k] << "\n";
    return out.str();
}

CountStore::CountStore(std::string directory) : directory_(std::move(directory)) {
    std::filesystem::create_directories(directory_);
}

std::string CountStore::key_path(Family family, int n, int m) const {
    std::ostringstream name;
    name << family_name(family) << "_n" << n << "_m" << m << "_v" << kCountStoreVersion
         << ".count";
    return (std::filesystem::path(directory_) / name.str()).string();
}

std::optional<CountReport> CountStore::load(Family family, int n, int m) const {
    std::ifstream in(key_path(family, n, m));
    if (!in.good()) return std::nullopt;
    return parse_count_report(in, family, n, m);
}

void CountStore::save(const CountReport& report) const {
    const std::string path = key_path(report.family, report.n, report.m);
    std::random_device rd;
    std::ostringstream temp_name;
    temp_name << path << ".tmp" << std::hex << rd() << rd();
    const std::string temp = temp_name.str();
    {
        std::ofstream out(temp);
        out << format_count_report(report);
        out.flush();
        if (!out.good()) {
            std::error_code ec;
            std::filesystem::remove(temp, ec);
            throw std::runtime_error("count store: cannot write '" + temp + "'");
        }
    }
    std::filesystem::rename(temp, path);
}

CountReport kappa(Family family, int n, int m, const CountStore* store, long long budget) {
    if (n < 1) throw std::invalid_argument("kappa: n must be at least one");
    if (m < 2) throw std::invalid_argument("kappa: at least two outcomes are required");
    if (store) {
        if (std::optional<CountReport> cached = store->load(family, n, m)) return *cached;
    }

    const std::vector<GraphDistribution> vertices =
        family == Family::Rose ? enumerate_rose_vertices(n, m, budget)
                               : enumerate_dipole_vertices(n, m, budget);

    if (static_cast<long long>(n) * m * m <= kCrossCheckVariables) {
        const Scenario S = family == Family::Rose ? rose_scenario(n, m) : dipole_scenario(n, m);
        const std::vector<RationalVector> reference = enumerate_vertices(build_polytope(S));
        bool same = reference.size() == vertices.size();
        for (std::size_t i = 0; same && i < reference.size(); ++i) {
            const RationalVector x = flatten(vertices[i]);
            same = x.size() == reference[i].size();
            for (Index j = 0; same && j < x.size(); ++j) same = x(j) == reference[i](j);
        }
        if (!same)
            throw std::logic_error(
                "kappa: support search and polytope enumeration disagree for " +
                instance_label(family, n, m));
    }

    CountReport report;
    report.family = family;
    report.n = n;
    report.m = m;
    report.total = static_cast<long long>(vertices.size());
    report.by_collapsed.assign(static_cast<std::size_t>(n) + 1, 0);
    report.by_collapsed_deterministic.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const GraphDistribution& p : vertices) {
        std::size_t collapsed = 0;
        for (const RationalMatrix& M : p.edge_matrices())
            if (is_collapsed(M)) ++collapsed;
        ++report.by_collapsed[collapsed];
        if (p.is_deterministic()) {
            ++report.deterministic;
            ++report.by_collapsed_deterministic[collapsed];
        }
    }
    report.contextual = report.total - report.deterministic;
    report.text = format_count_report(report);

    if (store) store->save(report);
    return report;
}

long long kappa_tilde(Family family, int n, int m, const CountStore* store, long long budget) {
    const CountReport report = kappa(family, n, m, store, budget);
    const long long direct = report.by_collapsed[0] - report.by_collapsed_deterministic[0];

    // Vertices with at least one collapsed edge, by inclusion-exclusion over
    // fixed collapsed patterns; a fixed pattern of k collapsed edges leaves a
    // rose count of size n-k in both families, and collapsing everything
    // leaves the m outcome atoms.
    long long with_collapsed = 0;
    for (int k = 1; k <= n; ++k) {
        const long long fixed =
            k == n ? m : kappa(Family::Rose, n - k, m, store, budget).total;
        const long long term = binomial(n, k) * fixed;
        with_collapsed += k % 2 == 1 ? term : -term;
    }
    const long long spare_deterministic =
        family == Family::Dipole ? static_cast<long long>(m) * (m - 1) : 0;
    const long long via_exclusion = report.total - with_collapsed - spare_deterministic;

    if (direct != via_exclusion)
        throw std::logic_error("kappa_tilde: census and inclusion-exclusion disagree for " +
                               instance_label(family, n, m));
    return direct;
}

long long lower_bound_rose(int n1, int n2, int m, const CountStore* store) {
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("lower bound: both sides must be at least one");
    if (n1 == 1 || n2 == 1)
        throw std::invalid_argument(
            "lower bound: a complete bipartite graph with a side of one is a tree");
    return general_lower_bound(complete_bipartite_scenario(n1, n2, m), m, store);
}

long long lower_bound_dipole(int n1, int n2, int m, const CountStore* store) {
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("lower bound: both sides must be at least one");
    if (m < 2) throw std::invalid_argument("lower bound: at least two outcomes are required");
    long long sum = 0;
    for (int k = 1; k < n1; ++k)
        for (int r = 1; r < n2; ++r) {
            const int crossing = k * (n2 - r) + (n1 - k) * r;
            sum += binomial(n1, k) * binomial(n2, r) *
                   kappa_tilde(Family::Dipole, crossing, m, store);
        }
    return sum;
}

long long general_lower_bound(const Scenario& S, int m, const CountStore* store) {
    if (m < 2) throw std::invalid_argument("lower bound: at least two outcomes are required");
    const Int trees = spanning_tree_count(S);
    const long long cycle_rank = static_cast<long long>(S.edges().size()) -
                                 static_cast<long long>(S.nodes().size()) + 1;
    if (cycle_rank <= 0) return 0;
    return kappa_tilde(Family::Rose, static_cast<int>(cycle_rank), m, store) *
           trees.convert_to<long long>();
}

}  // namespace gdp
