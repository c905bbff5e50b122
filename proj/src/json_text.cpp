#include "winprob/json_text.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace winprob {

std::string plain_decimal(double v)
{
    if (!std::isfinite(v)) return "null";
    if (v == 0.0) return "0";
    char buf[512];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    if (r.ec != std::errc{}) return "null";
    return std::string(buf, r.ptr);
}

namespace {

void write(std::string& out, const Json& j, int indent, int depth)
{
    const bool pretty = indent >= 0;
    auto newline = [&](int d) {
        if (!pretty) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
    case Json::value_t::number_float:
        out += plain_decimal(j.get<double>());
        return;
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            out += Json(it.key()).dump();
            out += pretty ? ": " : ":";
            write(out, it.value(), indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& v : j) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            write(out, v, indent, depth + 1);
        }
        newline(depth);
        out += ']';
        return;
    }
    default:
        out += j.dump();
    }
}

} // namespace

std::string dump_plain(const Json& j, int indent)
{
    std::string out;
    write(out, j, indent, 0);
    return out;
}

} // namespace winprob
