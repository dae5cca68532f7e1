#include "tap/graph_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <unordered_map>

namespace tap {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

LoadedGraph load_snap_edgelist(const std::filesystem::path &path, bool symmetrize) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open edge list: " + path.string());

    std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::size_t pos = line.find_first_not_of(" \t");
        if (pos == std::string::npos)
            continue;
        if (line[pos] == '#')
            continue;

        const char *cur = line.data() + pos;
        const char *end = line.data() + line.size();
        std::uint64_t ids[2];
        for (int f = 0; f < 2; ++f) {
            while (cur < end && (*cur == ' ' || *cur == '\t'))
                ++cur;
            auto [next, ec] = std::from_chars(cur, end, ids[f]);
            if (ec != std::errc{} || next == cur)
                throw ParseError("malformed edge line", lineno);
            cur = next;
        }
        while (cur < end && (*cur == ' ' || *cur == '\t'))
            ++cur;
        if (cur != end)
            throw ParseError("trailing characters after edge", lineno);
        raw.emplace_back(ids[0], ids[1]);
    }
    if (raw.empty())
        throw InputError("empty graph: " + path.string());

    std::vector<std::uint64_t> original_ids;
    original_ids.reserve(2 * raw.size());
    for (const auto &[u, v] : raw) {
        original_ids.push_back(u);
        original_ids.push_back(v);
    }
    std::sort(original_ids.begin(), original_ids.end());
    original_ids.erase(std::unique(original_ids.begin(), original_ids.end()),
                       original_ids.end());

    std::unordered_map<std::uint64_t, NodeId> remap;
    remap.reserve(original_ids.size());
    for (std::size_t i = 0; i < original_ids.size(); ++i)
        remap.emplace(original_ids[i], static_cast<NodeId>(i));

    std::vector<Edge> edges;
    edges.reserve(raw.size() * (symmetrize ? 2 : 1));
    for (const auto &[u, v] : raw) {
        const NodeId a = remap.at(u);
        const NodeId b = remap.at(v);
        if (a == b)
            continue; // self-loops are meaningless for activation
        edges.push_back({a, b});
        if (symmetrize)
            edges.push_back({b, a});
    }
    return {DirectedGraph(static_cast<NodeId>(original_ids.size()), std::move(edges), true),
            std::move(original_ids)};
}

namespace {

constexpr char kGraphMagic[4] = {'T', 'A', 'P', 'G'};
constexpr std::uint32_t kGraphVersion = 1;

template <typename T> void write_raw(std::ostream &out, const T &value) {
    out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T> T read_raw(std::istream &in, const char *what) {
    T value;
    in.read(reinterpret_cast<char *>(&value), sizeof(T));
    if (!in)
        throw InputError(std::string("truncated file while reading ") + what);
    return value;
}

} // namespace

void save_graph_cache(const DirectedGraph &g, const std::filesystem::path &path) {
    if (g.has_tombstones())
        throw InputError("refusing to cache a residual graph");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputError("cannot write graph cache: " + path.string());
    out.write(kGraphMagic, 4);
    write_raw(out, kGraphVersion);
    write_raw(out, static_cast<std::uint64_t>(g.node_count()));
    write_raw(out, static_cast<std::uint64_t>(g.edge_count()));
    for (const Edge &e : g.edge_list()) {
        write_raw(out, e.src);
        write_raw(out, e.dst);
    }
    if (!out)
        throw InputError("write failed: " + path.string());
}

DirectedGraph load_graph_cache(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open graph cache: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kGraphMagic, 4) != 0)
        throw InputError("not a TAPG file: " + path.string());
    if (read_raw<std::uint32_t>(in, "version") != kGraphVersion)
        throw InputError("unsupported TAPG version: " + path.string());
    const auto n = read_raw<std::uint64_t>(in, "node count");
    const auto m = read_raw<std::uint64_t>(in, "edge count");
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::uint64_t e = 0; e < m; ++e) {
        const auto src = read_raw<NodeId>(in, "edge source");
        const auto dst = read_raw<NodeId>(in, "edge target");
        edges.push_back({src, dst});
    }
    return DirectedGraph(static_cast<NodeId>(n), std::move(edges), false);
}

std::uint64_t graph_content_hash(const DirectedGraph &g) {
    // FNV-1a over n and the sorted edge list.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&h](std::uint64_t value) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (value >> (8 * byte)) & 0xFF;
            h *= 0x100000001B3ULL;
        }
    };
    mix(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u)
        for (NodeId v : g.out_neighbors(u))
            mix((static_cast<std::uint64_t>(u) << 32) | v);
    return h;
}

double estimate_power_law_exponent(const DirectedGraph &g) {
    std::size_t dmax = 0;
    for (NodeId u = 0; u < g.node_count(); ++u)
        dmax = std::max(dmax, g.out_degree(u));
    if (dmax < 4)
        throw InputError("degree range too small for a power-law fit");

    std::vector<std::size_t> count(dmax + 1, 0);
    std::size_t nodes_with_degree = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        const std::size_t d = g.out_degree(u);
        if (d > 0) {
            ++count[d];
            ++nodes_with_degree;
        }
    }

    // Count-weighted regression of the log midpoint-CCDF (tail - count/2,
    // the discrete continuity correction) against log degree over the
    // upper decade; the pdf exponent is the fitted slope minus one.
    const std::size_t dlow = std::max<std::size_t>(2, dmax / 10);
    std::vector<std::size_t> tail(dmax + 2, 0);
    for (std::size_t d = dmax; d >= 1; --d)
        tail[d] = tail[d + 1] + count[d];

    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t points = 0;
    for (std::size_t d = dlow; d <= dmax; ++d) {
        if (count[d] == 0)
            continue;
        const double mid = static_cast<double>(tail[d]) - 0.5 * static_cast<double>(count[d]);
        if (mid <= 0.0)
            continue;
        const double w = static_cast<double>(count[d]);
        const double x = std::log(static_cast<double>(d));
        const double y = std::log(mid / static_cast<double>(nodes_with_degree));
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
        ++points;
    }
    if (points < 3)
        throw InputError("too few distinct degrees in the fit range");
    const double slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    return slope - 1.0;
}

} // namespace tap
