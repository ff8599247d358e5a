#pragma once

#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrdisc/mining.hpp"
#include "corrdisc/types.hpp"

namespace corrdisc {

/// One transaction per line as space-separated service ids. Lines starting
/// with '#' and blank lines are skipped.
inline std::vector<Transaction<ServiceId>> read_transactions(std::istream& is) {
    std::vector<Transaction<ServiceId>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        Transaction<ServiceId> t;
        std::string tok;
        while (ls >> tok) {
            std::size_t used = 0;
            unsigned long v = 0;
            try {
                v = std::stoul(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size() || tok[0] == '-' || v > 0xffff) {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": bad service id '" + tok + "'");
            }
            t.push_back(ServiceId{static_cast<std::uint16_t>(v)});
        }
        out.push_back(detail::normalized(std::move(t)));
    }
    return out;
}

} // namespace corrdisc
