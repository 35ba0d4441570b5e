#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "coprony/errors.hpp"
#include "coprony/model.hpp"

namespace coprony {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& field, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size())
            throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::Io, "trace line " + std::to_string(line) + ": bad number '" +
                                       field + "'");
    }
}

}  // namespace

std::map<SampleIndex, Complex> read_trace_csv(std::istream& in) {
    std::map<SampleIndex, Complex> values;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty())
            continue;
        if (!header) {
            if (line != "index,re,im")
                throw Error(ErrorKind::Io, "trace header must be 'index,re,im'");
            header = true;
            continue;
        }
        std::stringstream row(line);
        std::string idx, re, im;
        if (!std::getline(row, idx, ',') || !std::getline(row, re, ',') ||
            !std::getline(row, im, ','))
            throw Error(ErrorKind::Io, "trace line " + std::to_string(lineno) +
                                           ": expected three fields");
        idx = trim(idx);
        SampleIndex j = 0;
        const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), j);
        if (ec != std::errc{} || ptr != idx.data() + idx.size() || j < 0)
            throw Error(ErrorKind::Io, "trace line " + std::to_string(lineno) +
                                           ": bad index '" + idx + "'");
        values[j] = {parse_double(trim(re), lineno), parse_double(trim(im), lineno)};
    }
    if (!header)
        throw Error(ErrorKind::Io, "trace is missing its header");
    return values;
}

void write_trace_csv(std::ostream& out, const std::map<SampleIndex, Complex>& values) {
    out << "index,re,im\n";
    char buf[96];
    for (const auto& [j, v] : values) {
        // 17 significant digits: the trace round-trips bit-exactly.
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n", static_cast<long long>(j), v.real(),
                      v.imag());
        out << buf;
    }
}

}  // namespace coprony
