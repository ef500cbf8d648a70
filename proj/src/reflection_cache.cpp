#include "cpg/reflection_cache.hpp"

#include "cpg/errors.hpp"
#include "cpg/hash.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace cpg {

namespace {

constexpr char magic[8] = {'C', 'P', 'G', 'R', 'C', 'A', 'C', 'H'};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}
    void u32(std::uint32_t v) { raw(v, 4); }
    void u64(std::uint64_t v) { raw(v, 8); }
    void i32(std::int32_t v) { raw(static_cast<std::uint32_t>(v), 4); }
    void f64(double v) { raw(std::bit_cast<std::uint64_t>(v), 8); }

private:
    void raw(std::uint64_t v, int n) {
        char b[8];
        for (int i = 0; i < n; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(b, n);
    }
    std::ostream& out_;
};

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}
    std::uint32_t u32() { return static_cast<std::uint32_t>(raw(4)); }
    std::uint64_t u64() { return raw(8); }
    std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(raw(4))); }
    double f64() { return std::bit_cast<double>(raw(8)); }

private:
    std::uint64_t raw(int n) {
        unsigned char b[8];
        if (!in_.read(reinterpret_cast<char*>(b), n)) throw InputError("reflection cache file truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    std::istream& in_;
};

} // namespace

std::uint64_t reflection_key(const GratingGeometry& geom, double eps_value, const TruncationSpec& trunc,
                             const SpectralNode& node) {
    return Fnv1a{}
        .u64(geom.fingerprint())
        .f64(eps_value)
        .i64(trunc.n_max)
        .i64(trunc.field())
        .f64(node.kx0)
        .f64(node.ky)
        .f64(node.xi)
        .digest();
}

std::optional<ReflectionMatrix> ReflectionCache::find(std::uint64_t key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    ++hits_;
    return it->second;
}

void ReflectionCache::insert(std::uint64_t key, const ReflectionMatrix& m) {
    std::lock_guard lock(mutex_);
    entries_.try_emplace(key, m);
}

std::size_t ReflectionCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::size_t ReflectionCache::hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
}

void ReflectionCache::save(const std::string& path) const {
    std::lock_guard lock(mutex_);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write reflection cache '" + path + "'");
    out.write(magic, sizeof magic);
    Writer w(out);
    w.u32(format_version);
    w.u64(entries_.size());
    std::vector<std::uint64_t> keys;
    keys.reserve(entries_.size());
    for (const auto& [k, _] : entries_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (auto k : keys) {
        const ReflectionMatrix& m = entries_.at(k);
        w.u64(k);
        w.i32(m.n_max());
        w.f64(m.node().kx0);
        w.f64(m.node().ky);
        w.f64(m.node().xi);
        w.f64(m.reference_height());
        w.f64(m.eps_value);
        w.f64(m.rcond);
        for (double kappa : m.kappa()) w.f64(kappa);
        const auto& top = m.at_top();
        for (int r = 0; r < top.rows(); ++r)
            for (int c = 0; c < top.cols(); ++c) w.f64(top(r, c));
    }
    if (!out) throw InputError("failed writing reflection cache '" + path + "'");
}

void ReflectionCache::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open reflection cache '" + path + "'");
    char head[8];
    if (!in.read(head, sizeof head) || std::memcmp(head, magic, sizeof magic) != 0)
        throw InputError("'" + path + "' is not a reflection cache file");
    Reader r(in);
    const std::uint32_t version = r.u32();
    if (version != format_version)
        throw InputError("reflection cache '" + path + "' has unsupported version " + std::to_string(version));
    const std::uint64_t count = r.u64();
    std::unordered_map<std::uint64_t, ReflectionMatrix> loaded;
    for (std::uint64_t e = 0; e < count; ++e) {
        const std::uint64_t key = r.u64();
        const int n_max = r.i32();
        if (n_max < 0 || n_max > 1000) throw InputError("reflection cache entry has invalid n_max");
        SpectralNode node;
        node.kx0 = r.f64();
        node.ky = r.f64();
        node.xi = r.f64();
        const double ref = r.f64();
        const double eps = r.f64();
        const double rcond = r.f64();
        const int zones = 2 * n_max + 1;
        std::vector<double> kappa(static_cast<std::size_t>(zones));
        for (auto& k : kappa) k = r.f64();
        Eigen::MatrixXd top(2 * zones, 2 * zones);
        for (int row = 0; row < top.rows(); ++row)
            for (int col = 0; col < top.cols(); ++col) top(row, col) = r.f64();
        ReflectionMatrix m(n_max, node, ref, std::move(top), std::move(kappa));
        m.eps_value = eps;
        m.rcond = rcond;
        loaded.insert_or_assign(key, std::move(m));
    }
    std::lock_guard lock(mutex_);
    for (auto& [k, m] : loaded) entries_.insert_or_assign(k, std::move(m));
}

} // namespace cpg
