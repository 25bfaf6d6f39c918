#include "lrq/mdp_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <span>
#include <string>

#include "lrq/errors.hpp"

namespace lrq {

namespace {

constexpr std::array<char, 8> kMatrixMagic{'L', 'R', 'Q', 'M', 'A', 'T', '\0', '\0'};
constexpr std::array<char, 8> kMdpMagic{'L', 'R', 'Q', 'M', 'D', 'P', '\0', '\0'};

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        std::array<unsigned char, sizeof(T)> bytes;
        std::memcpy(bytes.data(), &v, sizeof(T));
        std::reverse(bytes.begin(), bytes.end());
        std::memcpy(&v, bytes.data(), sizeof(T));
        return v;
    }
}

template <typename T>
void put(std::ostream& out, T v) {
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void put_array(std::ostream& out, std::span<const T> values) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    } else {
        for (T v : values) put(out, v);
    }
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError("truncated binary payload");
    return to_little(v);
}

template <typename T>
std::vector<T> get_array(std::istream& in, std::uint64_t count) {
    // Guard against absurd counts from corrupted headers before allocating.
    if (count > (std::uint64_t{1} << 40) / sizeof(T)) throw FormatError("array length implausibly large");
    std::vector<T> values(count);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(T)));
    if (!in) throw FormatError("truncated binary payload");
    if constexpr (std::endian::native != std::endian::little) {
        for (auto& v : values) v = to_little(v);
    }
    return values;
}

void expect_header(std::istream& in, const std::array<char, 8>& magic, std::uint32_t version, const char* what) {
    std::array<char, 8> got{};
    in.read(got.data(), got.size());
    if (!in || got != magic) throw FormatError(std::string(what) + ": bad magic bytes");
    const auto v = get<std::uint32_t>(in);
    if (v != version) throw FormatError(std::string(what) + ": unsupported version " + std::to_string(v));
    (void)get<std::uint32_t>(in);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

}  // namespace

void write_matrix(std::ostream& out, const DenseMatrix& m) {
    out.write(kMatrixMagic.data(), kMatrixMagic.size());
    put<std::uint32_t>(out, kMatrixFormatVersion);
    put<std::uint32_t>(out, 0);
    put<std::uint64_t>(out, m.rows());
    put<std::uint64_t>(out, m.cols());
    put_array<double>(out, m.data());
}

DenseMatrix read_matrix(std::istream& in) {
    expect_header(in, kMatrixMagic, kMatrixFormatVersion, "matrix");
    const auto rows = get<std::uint64_t>(in);
    const auto cols = get<std::uint64_t>(in);
    auto data = get_array<double>(in, rows * cols);
    try {
        return DenseMatrix(rows, cols, std::move(data));
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("matrix: ") + e.what());
    }
}

void save_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
    auto out = open_out(path);
    write_matrix(out, m);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_matrix(in);
}

void write_mdp(std::ostream& out, const TabularMdp& mdp) {
    out.write(kMdpMagic.data(), kMdpMagic.size());
    put<std::uint32_t>(out, kMdpFormatVersion);
    put<std::uint32_t>(out, 0);
    put<std::uint64_t>(out, mdp.n_states());
    put<std::uint64_t>(out, mdp.n_actions());
    put<double>(out, mdp.gamma());
    put<std::uint64_t>(out, mdp.all_next_states().size());
    put_array<double>(out, mdp.rewards());
    put_array<std::uint64_t>(out, mdp.offsets());
    put_array<std::uint32_t>(out, mdp.all_next_states());
    put_array<double>(out, mdp.all_probabilities());
}

TabularMdp read_mdp(std::istream& in) {
    expect_header(in, kMdpMagic, kMdpFormatVersion, "mdp");
    const auto n_states = get<std::uint64_t>(in);
    const auto n_actions = get<std::uint64_t>(in);
    const auto gamma = get<double>(in);
    const auto nnz = get<std::uint64_t>(in);
    const std::uint64_t pairs = n_states * n_actions;
    auto rewards = get_array<double>(in, pairs);
    auto offsets = get_array<std::uint64_t>(in, pairs + 1);
    auto next = get_array<std::uint32_t>(in, nnz);
    auto prob = get_array<double>(in, nnz);
    try {
        return TabularMdp(n_states, n_actions, gamma, std::move(rewards), std::move(offsets), std::move(next),
                          std::move(prob));
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("mdp: ") + e.what());
    }
}

void save_mdp(const std::filesystem::path& path, const TabularMdp& mdp) {
    auto out = open_out(path);
    write_mdp(out, mdp);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

TabularMdp load_mdp(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_mdp(in);
}

void save_policy_csv(const std::filesystem::path& path, const Policy& pi) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "state,action\n";
    for (std::size_t s = 0; s < pi.size(); ++s) out << s << ',' << pi[s] << '\n';
}

Policy load_policy_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("state,action", 0) != 0) {
        throw FormatError("policy csv: missing 'state,action' header");
    }
    Policy pi;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError("policy csv: malformed row '" + line + "'");
        std::uint64_t s = 0, a = 0;
        const auto parse = [&](std::string_view field, std::uint64_t& out) {
            const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
            if (ec != std::errc{} || end != field.data() + field.size())
                throw FormatError("policy csv: malformed row '" + line + "'");
        };
        parse(std::string_view(line).substr(0, comma), s);
        parse(std::string_view(line).substr(comma + 1), a);
        if (a > UINT32_MAX) throw FormatError("policy csv: action index too large in row '" + line + "'");
        if (s != pi.action.size()) throw FormatError("policy csv: states must be listed in order");
        pi.action.push_back(static_cast<std::uint32_t>(a));
    }
    return pi;
}

}  // namespace lrq
