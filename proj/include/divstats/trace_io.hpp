#pragma once

// Trace export. Binary layout (all little-endian):
//   "FTRC" | u32 version | u64 sample count | u32 channel count
//   | channel names: per channel u32 length + bytes
//   | channel-major f64 columns
// Channels: time, x01, x02, w<i>_<k> for each interferer i and branch k, g, branch.

#include "divstats/errors.hpp"
#include "divstats/format.hpp"
#include "divstats/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace divstats::montecarlo {

inline constexpr std::array<char, 4> kTraceMagic = {'F', 'T', 'R', 'C'};
inline constexpr std::uint32_t kTraceVersion = 1;

struct TraceColumns {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
};

inline TraceColumns trace_columns(const FadingTrace& tr) {
    TraceColumns out;
    const std::size_t n = tr.size();
    std::vector<double> time(n);
    for (std::size_t k = 0; k < n; ++k) time[k] = tr.start_time + static_cast<double>(k) * tr.time_step;
    out.names.emplace_back("time");
    out.columns.push_back(std::move(time));
    out.names.emplace_back("x01");
    out.columns.push_back(tr.desired[0]);
    out.names.emplace_back("x02");
    out.columns.push_back(tr.desired[1]);
    for (std::size_t i = 0; i < tr.interferers.size(); ++i) {
        for (int k = 0; k < 2; ++k) {
            out.names.push_back("w" + std::to_string(i + 1) + "_" + std::to_string(k + 1));
            out.columns.push_back(tr.interferers[i][k]);
        }
    }
    out.names.emplace_back("g");
    out.columns.push_back(tr.selected_ratio);
    std::vector<double> branch(n);
    for (std::size_t k = 0; k < n; ++k) branch[k] = tr.selected_branch[k] + 1.0;
    out.names.emplace_back("branch");
    out.columns.push_back(std::move(branch));
    return out;
}

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw DomainError("trace file truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

} // namespace detail

inline void write_trace_binary(std::ostream& os, const FadingTrace& tr) {
    const auto cols = trace_columns(tr);
    os.write(kTraceMagic.data(), kTraceMagic.size());
    detail::put_le<std::uint32_t>(os, kTraceVersion);
    detail::put_le<std::uint64_t>(os, tr.size());
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(cols.columns.size()));
    for (const auto& name : cols.names) {
        detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    for (const auto& c : cols.columns) {
        for (double v : c) detail::put_le<double>(os, v);
    }
    if (!os) throw std::runtime_error("failed to write trace");
}

inline TraceColumns read_trace_binary(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kTraceMagic) throw DomainError("not an FTRC trace");
    const auto version = detail::get_le<std::uint32_t>(is);
    if (version != kTraceVersion) throw DomainError("unsupported trace version " + std::to_string(version));
    const auto samples = detail::get_le<std::uint64_t>(is);
    const auto channels = detail::get_le<std::uint32_t>(is);
    TraceColumns out;
    for (std::uint32_t c = 0; c < channels; ++c) {
        const auto len = detail::get_le<std::uint32_t>(is);
        std::string name(len, '\0');
        if (!is.read(name.data(), len)) throw DomainError("trace file truncated");
        out.names.push_back(std::move(name));
    }
    out.columns.assign(channels, std::vector<double>(samples));
    for (auto& c : out.columns) {
        for (auto& v : c) v = detail::get_le<double>(is);
    }
    return out;
}

inline void write_trace_csv(std::ostream& os, const FadingTrace& tr) {
    const auto cols = trace_columns(tr);
    for (std::size_t c = 0; c < cols.names.size(); ++c) os << (c ? "," : "") << cols.names[c];
    os << '\n';
    for (std::size_t k = 0; k < tr.size(); ++k) {
        for (std::size_t c = 0; c < cols.columns.size(); ++c) os << (c ? "," : "") << format_double(cols.columns[c][k]);
        os << '\n';
    }
}

} // namespace divstats::montecarlo
