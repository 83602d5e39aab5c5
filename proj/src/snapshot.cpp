#include "qnls/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace qnls {

namespace {

constexpr char kMagic[5] = {'Q', 'N', 'L', 'S', '1'};

std::uint64_t fnv1a(const unsigned char* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

template <class T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw CorruptSnapshot("snapshot: truncated header");
    return v;
}

} // namespace

void save_snapshot(const std::string& path, const FieldPair& fp, const SnapshotMeta& meta) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("save_snapshot: cannot open " + path);
    const std::size_t bytes = fp.u.size() * sizeof(cxd);
    std::uint64_t sum = fnv1a(reinterpret_cast<const unsigned char*>(fp.u.val.data()), bytes);
    sum = fnv1a(reinterpret_cast<const unsigned char*>(fp.v.val.data()), bytes, sum);

    os.write(kMagic, sizeof kMagic);
    if (fp.on_tensor()) {
        const Grid& g = fp.tensor();
        put<std::uint8_t>(os, 0);
        put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim));
        put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n));
        put<double>(os, g.length);
    } else {
        const RadialGrid& rg = fp.radial();
        put<std::uint8_t>(os, 1);
        put<std::uint32_t>(os, static_cast<std::uint32_t>(rg.dim));
        put<std::uint32_t>(os, static_cast<std::uint32_t>(rg.nr));
        put<double>(os, rg.r_max);
    }
    put<double>(os, meta.kappa);
    put<double>(os, meta.time);
    put<std::uint64_t>(os, sum);
    os.write(reinterpret_cast<const char*>(fp.u.val.data()), bytes);
    os.write(reinterpret_cast<const char*>(fp.v.val.data()), bytes);
    if (!os) throw Error("save_snapshot: write failed on " + path);
}

FieldPair load_snapshot(const std::string& path, SnapshotMeta* meta) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("load_snapshot: cannot open " + path);
    char magic[5];
    is.read(magic, sizeof magic);
    if (!is) throw CorruptSnapshot("snapshot: truncated magic");
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw VersionMismatch("snapshot: unknown magic");

    const auto kind = get<std::uint8_t>(is);
    const auto dim = get<std::uint32_t>(is);
    const auto pts = get<std::uint32_t>(is);
    const auto extent = get<double>(is);
    SnapshotMeta m;
    m.kappa = get<double>(is);
    m.time = get<double>(is);
    const auto sum = get<std::uint64_t>(is);

    FieldPair fp;
    if (kind == 0) {
        Grid g(static_cast<int>(dim), static_cast<int>(pts), extent);
        fp = FieldPair(ComplexField(g), ComplexField(g));
    } else if (kind == 1) {
        RadialGrid rg(static_cast<int>(dim), static_cast<int>(pts), extent);
        fp = FieldPair(ComplexField(rg), ComplexField(rg));
    } else {
        throw CorruptSnapshot("snapshot: bad grid kind");
    }
    const std::size_t bytes = fp.u.size() * sizeof(cxd);
    is.read(reinterpret_cast<char*>(fp.u.val.data()), bytes);
    is.read(reinterpret_cast<char*>(fp.v.val.data()), bytes);
    if (!is) throw CorruptSnapshot("snapshot: truncated payload");

    std::uint64_t actual = fnv1a(reinterpret_cast<const unsigned char*>(fp.u.val.data()), bytes);
    actual = fnv1a(reinterpret_cast<const unsigned char*>(fp.v.val.data()), bytes, actual);
    if (actual != sum) throw CorruptSnapshot("snapshot: checksum mismatch");
    if (meta) *meta = m;
    return fp;
}

} // namespace qnls
