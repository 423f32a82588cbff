#include "xpay/deals.hpp"

#include <boost/graph/strong_components.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace xpay {

void DealMatrix::validate() const {
    for (const auto& [arc, asset] : entries) {
        if (arc.first == arc.second) throw std::invalid_argument("deal matrix has a diagonal entry");
        if (arc.first >= parties || arc.second >= parties) throw std::invalid_argument("deal entry out of range");
        if (asset.magnitude <= 0) throw std::invalid_argument("asset magnitudes must be positive");
    }
}

DealMatrix parse_deal(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    DealMatrix m;
    bool header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        if (!header) {
            std::string h;
            fields >> h;
            if (h.rfind("parties=", 0) != 0) throw std::invalid_argument("deal file must start with parties=m");
            try {
                std::size_t used = 0;
                const auto v = std::stol(h.substr(8), &used);
                if (used != h.size() - 8 || v < 0) throw std::invalid_argument("bad count");
                m.parties = static_cast<std::uint32_t>(v);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad party count in '" + h + "'");
            }
            header = true;
            continue;
        }
        long i = -1, j = -1;
        std::string label;
        long long magnitude = 0;
        std::string extra;
        if (!(fields >> i >> j >> label >> magnitude) || (fields >> extra) || i < 0 || j < 0)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 'i j label magnitude'");
        const Arc arc{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
        if (!m.entries.emplace(arc, Asset{label, magnitude}).second)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": duplicate entry");
    }
    if (!header) throw std::invalid_argument("deal file is empty");
    m.validate();
    return m;
}

DealMatrix load_deal(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_deal(buf.str());
}

std::string format_deal(const DealMatrix& m) {
    std::string out = "parties=" + std::to_string(m.parties) + "\n";
    for (const auto& [arc, a] : m.entries)
        out += std::to_string(arc.first) + " " + std::to_string(arc.second) + " " + a.label + " " +
               std::to_string(a.magnitude) + "\n";
    return out;
}

DealGraph to_digraph(const DealMatrix& m) {
    m.validate();
    DealGraph g(m.parties);
    for (const auto& [arc, asset] : m.entries) boost::add_edge(arc.first, arc.second, asset, g);
    return g;
}

bool is_well_formed(const DealMatrix& m) {
    const auto g = to_digraph(m);
    if (m.parties <= 1) return true;
    std::vector<int> component(boost::num_vertices(g));
    return boost::strong_components(g, boost::make_iterator_property_map(component.begin(),
                                                                         boost::get(boost::vertex_index, g))) == 1;
}

bool is_acceptable_payoff(const DealMatrix& m, std::uint32_t party, const std::set<Arc>& outcome) {
    m.validate();
    if (party >= m.parties) throw std::invalid_argument("party out of range");
    for (const auto& arc : outcome)
        if (!m.entries.contains(arc)) throw std::invalid_argument("outcome names an arc outside the deal");
    bool all_incoming = true;
    bool loses_nothing = true;
    for (const auto& [arc, _] : m.entries) {
        if (arc.second == party && !outcome.contains(arc)) all_incoming = false;
        if (arc.first == party && outcome.contains(arc)) loses_nothing = false;
    }
    return all_incoming || loses_nothing;
}

DealMatrix payment_to_deal(std::uint32_t n, bool with_certificate) {
    if (n == 0) throw std::invalid_argument("a payment needs at least one hop");
    DealMatrix m;
    m.parties = n + 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        m.entries[{i, i + 1}] = Asset{"$", 1};
        if (with_certificate) m.entries[{i + 1, i}] = Asset{"chi", 1};
    }
    return m;
}

}  // namespace xpay
