#pragma once

#include <boost/graph/adjacency_list.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>

namespace xpay {

struct Asset {
    std::string label;
    std::int64_t magnitude = 0;
    bool operator==(const Asset&) const = default;
};

using Arc = std::pair<std::uint32_t, std::uint32_t>;

/// entries[{i, j}] is what party i hands to party j. No diagonal entries,
/// magnitudes positive.
struct DealMatrix {
    std::uint32_t parties = 0;
    std::map<Arc, Asset> entries;

    /// Throws std::invalid_argument on a diagonal entry, an index out of
    /// range or a non-positive magnitude.
    void validate() const;
};

/// "parties=m" followed by one "i j label magnitude" line per entry. Blank
/// lines and lines starting with '#' are skipped. Throws std::invalid_argument.
DealMatrix parse_deal(std::string_view text);
DealMatrix load_deal(const std::filesystem::path& path);
std::string format_deal(const DealMatrix& m);

using DealGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS, boost::no_property, Asset>;

/// One vertex per party, one labelled arc per entry.
DealGraph to_digraph(const DealMatrix& m);

/// Strongly connected transfer graph. A lone party counts as well formed.
bool is_well_formed(const DealMatrix& m);

/// `outcome` lists the arcs that executed. The party must receive every
/// incoming asset, or part with nothing. Anything that dominates one of those
/// (fewer losses, more gains) is also acceptable, which adds no further
/// outcomes: both base cases are already closed upwards. Throws
/// std::invalid_argument when `outcome` names a non-arc or the party is out
/// of range.
bool is_acceptable_payoff(const DealMatrix& m, std::uint32_t party, const std::set<Arc>& outcome);

/// Customers c_0..c_n as parties 0..n with value flowing c_i -> c_{i+1}. With
/// `with_certificate`, each c_{i+1} also hands χ back to c_i, closing a cycle.
/// The non-certificate chain is never well formed. Throws
/// std::invalid_argument for n = 0.
DealMatrix payment_to_deal(std::uint32_t n, bool with_certificate = false);

}  // namespace xpay
