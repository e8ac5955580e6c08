#include "rdslab/degseq.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <numeric>

#include <fmt/core.h>

#include "rdslab/errors.hpp"

namespace rdslab {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<degree_t> read_integer_lines(const std::filesystem::path& path, degree_t min_value) {
    std::ifstream in(path);
    if (!in) throw io_error(fmt::format("cannot open '{}'", path.string()));

    std::vector<degree_t> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = trim(line);
        if (tok.empty() || tok.front() == '#') continue;
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw parse_error(fmt::format("not an integer: '{}'", tok), lineno);
        if (v < static_cast<std::int64_t>(min_value))
            throw parse_error(fmt::format("degree {} is below {}", v, min_value), lineno);
        if (v > std::numeric_limits<degree_t>::max())
            throw parse_error(fmt::format("degree {} is out of range", v), lineno);
        out.push_back(static_cast<degree_t>(v));
    }
    if (in.bad()) throw io_error(fmt::format("read failure on '{}'", path.string()));
    return out;
}

}  // namespace

degree_sequence::degree_sequence(std::vector<degree_t> degrees) : degrees_(std::move(degrees)) {
    if (!std::is_sorted(degrees_.begin(), degrees_.end(), std::greater<>{}))
        throw config_error("degree sequence must be sorted non-increasing");
    if (!degrees_.empty() && degrees_.front() >= degrees_.size())
        throw config_error(fmt::format("degree {} cannot be realized on {} nodes",
                                       degrees_.front(), degrees_.size()));
}

degree_sequence degree_sequence::from_unsorted(std::vector<degree_t> degrees) {
    std::sort(degrees.begin(), degrees.end(), std::greater<>{});
    return degree_sequence(std::move(degrees));
}

std::uint64_t degree_sequence::total() const noexcept {
    return std::accumulate(degrees_.begin(), degrees_.end(), std::uint64_t{0});
}

degree_source::degree_source(std::vector<degree_t> values) : values_(std::move(values)) {
    if (values_.empty()) throw config_error("empty degree source");
    if (std::any_of(values_.begin(), values_.end(), [](degree_t d) { return d < 1; }))
        throw config_error("degree source entries must be >= 1");
}

degree_source load_degree_source(const std::filesystem::path& path) {
    auto values = read_integer_lines(path, 1);
    if (values.empty()) throw io_error(fmt::format("empty degree source: {}", path.string()));
    return degree_source(std::move(values));
}

degree_sequence resample_degrees(const degree_source& source, std::size_t n_nodes, rng& gen) {
    if (n_nodes < 1) throw config_error("resample_degrees: N must be >= 1");
    const auto pool = source.values();
    std::vector<degree_t> out;
    out.reserve(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const degree_t d = pool[gen.below(pool.size())];
        if (d >= n_nodes)
            throw compute_error(
                fmt::format("resampled degree {} is impossible on {} nodes", d, n_nodes));
        out.push_back(d);
    }
    return degree_sequence::from_unsorted(std::move(out));
}

degree_source synthetic_degree_source(const synthetic_pool_spec& spec, rng& gen) {
    if (spec.pool_size < 1 || spec.mean <= 0.0 || spec.cap < 1)
        throw config_error("invalid synthetic pool parameters");
    std::vector<degree_t> values;
    values.reserve(spec.pool_size);
    while (values.size() < spec.pool_size) {
        const double d = 1.0 + std::floor(gen.exponential(spec.mean));
        if (d <= spec.cap) values.push_back(static_cast<degree_t>(d));
    }
    return degree_source(std::move(values));
}

graphicality check_graphical(const degree_sequence& seq) {
    graphicality out;
    out.even_sum = seq.total() % 2 == 0;

    // Sorted non-increasing, so the k terms of the left-hand side that are
    // positive form a prefix; two pointers keep each k at amortized O(1).
    // lhs(k) = sum_{i<=k} max(D_i - (k-1), 0) = S_pos - (k-1) * c_pos
    // where c_pos counts the i <= k with D_i > k-1 and S_pos is their sum.
    const std::size_t n = seq.size();
    std::uint64_t tail = seq.total();
    std::size_t positive = 0;  // prefix length with D_i > k-1, clipped to k
    std::uint64_t positive_sum = 0;
    for (std::size_t k = 1; k < n; ++k) {
        tail -= seq[k - 1];
        // Extend by element k-1 if it qualifies.
        if (positive == k - 1 && seq[k - 1] > k - 1) {
            ++positive;
            positive_sum += seq[k - 1];
        }
        // Shrink entries that no longer exceed k-1.
        while (positive > 0 && seq[positive - 1] <= k - 1) {
            --positive;
            positive_sum -= seq[positive];
        }
        const std::uint64_t lhs = positive_sum - static_cast<std::uint64_t>(k - 1) * positive;
        if (lhs > tail) {
            out.failing_k = k;
            break;
        }
    }
    out.graphical = out.even_sum && !out.failing_k;
    return out;
}

std::string graphicality::describe() const {
    if (graphical) return "graphical";
    std::string why;
    if (!even_sum) why = "odd degree sum";
    if (failing_k) {
        if (!why.empty()) why += "; ";
        why += fmt::format("prefix inequality fails at k={}", *failing_k);
    }
    return "not graphical: " + why;
}

void write_degree_sequence(const degree_sequence& seq, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error(fmt::format("cannot write '{}'", path.string()));
    for (auto d : seq) out << d << '\n';
    if (!out) throw io_error(fmt::format("write failure on '{}'", path.string()));
}

degree_sequence read_degree_sequence(const std::filesystem::path& path) {
    auto values = read_integer_lines(path, 0);
    if (values.empty()) throw io_error(fmt::format("empty degree sequence: {}", path.string()));
    return degree_sequence::from_unsorted(std::move(values));
}

}  // namespace rdslab
