#include "mblrevive/model.hpp"

#include "mblrevive/errors.hpp"
#include "mblrevive/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

namespace mblrevive {

namespace {

constexpr int start_channel = 4;
constexpr int done_channel  = 0;

int site_bit(std::uint64_t index, std::size_t length, std::size_t j) {
    return static_cast<int>((index >> (length - 1 - j)) & 1U);
}

// Diagonal energy of a dense basis index.
double diagonal_energy(const DisorderRealization &d, std::uint64_t index, double exchange) {
    const auto L = d.length;
    double     e = 0.0;
    for(std::size_t j = 0; j < L; ++j) {
        const double s = site_bit(index, L, j) == 0 ? 1.0 : -1.0;
        e += 0.5 * d.fields[j] * s;
        if(j + 1 < L) {
            const double s2 = site_bit(index, L, j + 1) == 0 ? 1.0 : -1.0;
            e -= 0.25 * exchange * s * s2;
        }
    }
    return e;
}

void check_realization(const DisorderRealization &d) {
    if(d.length < 2) throw InvalidSizeError("chain length must be at least 2");
    if(d.fields.size() != d.length) throw LengthMismatchError("field count does not match chain length");
}

} // namespace

DisorderRealization sample_disorder(std::size_t length, double strength, std::uint64_t seed) {
    if(length < 2) throw InvalidSizeError("chain length must be at least 2, got " + std::to_string(length));
    if(!(strength >= 0.0) || !std::isfinite(strength)) throw ValidationError("disorder strength must be finite and nonnegative");
    DisorderRealization d{length, strength, seed, {}};
    d.fields.reserve(length);
    for(std::size_t j = 0; j < length; ++j) {
        const double u = rng::to_unit(rng::counter_u64(seed, j));
        d.fields.push_back(strength * (2.0 * u - 1.0));
    }
    return d;
}

DisorderRealization make_realization(std::vector<double> fields, double strength, std::uint64_t seed) {
    if(fields.size() < 2) throw InvalidSizeError("chain length must be at least 2");
    for(double h : fields)
        if(std::abs(h) > strength) throw ValidationError("field exceeds disorder strength");
    const auto length = fields.size();
    return DisorderRealization{length, strength, seed, std::move(fields)};
}

nlohmann::json to_json(const DisorderRealization &d) {
    return nlohmann::json{{"schema_version", disorder_schema_version},
                          {"generator", std::string(rng::generator_name)},
                          {"L", d.length},
                          {"W", d.strength},
                          {"seed", d.seed},
                          {"h", d.fields}};
}

DisorderRealization disorder_from_json(const nlohmann::json &j) {
    if(j.value("schema_version", 0) != disorder_schema_version) throw IoError("unsupported disorder schema_version");
    DisorderRealization d;
    d.length   = j.at("L").get<std::size_t>();
    d.strength = j.at("W").get<double>();
    d.seed     = j.at("seed").get<std::uint64_t>();
    d.fields   = j.at("h").get<std::vector<double>>();
    check_realization(d);
    return d;
}

void save_disorder(const DisorderRealization &d, const std::string &path) {
    std::ofstream out(path);
    if(!out) throw IoError("cannot write " + path);
    out << to_json(d).dump(2) << '\n';
}

DisorderRealization load_disorder(const std::string &path) {
    std::ifstream in(path);
    if(!in) throw IoError("cannot read " + path);
    return disorder_from_json(nlohmann::json::parse(in));
}

// ---------------------------------------------------------------------------

SpinConfiguration SpinConfiguration::domain_wall(std::size_t length, std::size_t k) {
    if(k > length) throw ValidationError("domain-wall position exceeds chain length");
    std::vector<Spin> s(length, Spin::up);
    std::fill_n(s.begin(), k, Spin::down);
    return SpinConfiguration(std::move(s));
}

SpinConfiguration SpinConfiguration::flipped_domain_wall(std::size_t length, std::size_t k) {
    return domain_wall(length, k).flipped();
}

SpinConfiguration SpinConfiguration::from_index(std::size_t length, std::uint64_t index) {
    std::vector<Spin> s(length);
    for(std::size_t j = 0; j < length; ++j) s[j] = site_bit(index, length, j) == 0 ? Spin::up : Spin::down;
    return SpinConfiguration(std::move(s));
}

SpinConfiguration SpinConfiguration::from_string(std::string_view text) {
    std::vector<Spin> s;
    for(char c : text) {
        if(c == 'u' || c == 'U' || c == '0') s.push_back(Spin::up);
        else if(c == 'd' || c == 'D' || c == '1') s.push_back(Spin::down);
        else throw ValidationError(std::string("invalid spin character '") + c + "'");
    }
    return SpinConfiguration(std::move(s));
}

int SpinConfiguration::magnetization() const noexcept {
    int m = 0;
    for(Spin s : spins_) m += s == Spin::up ? 1 : -1;
    return m;
}

std::uint64_t SpinConfiguration::index() const {
    if(spins_.size() > 63) throw InvalidSizeError("configuration too long for a dense index");
    std::uint64_t idx = 0;
    for(Spin s : spins_) idx = (idx << 1U) | (s == Spin::down ? 1U : 0U);
    return idx;
}

std::string SpinConfiguration::to_string() const {
    std::string out;
    for(Spin s : spins_) out.push_back(s == Spin::up ? 'u' : 'd');
    return out;
}

SpinConfiguration SpinConfiguration::flipped() const {
    std::vector<Spin> s(spins_);
    for(auto &x : s) x = x == Spin::up ? Spin::down : Spin::up;
    return SpinConfiguration(std::move(s));
}

// ---------------------------------------------------------------------------

namespace spin {
Eigen::Matrix2cd identity() { return Eigen::Matrix2cd::Identity(); }
Eigen::Matrix2cd sx() {
    Eigen::Matrix2cd m;
    m << 0.0, 0.5, 0.5, 0.0;
    return m;
}
Eigen::Matrix2cd sy() {
    Eigen::Matrix2cd m;
    m << 0.0, cplx(0.0, -0.5), cplx(0.0, 0.5), 0.0;
    return m;
}
Eigen::Matrix2cd sz() {
    Eigen::Matrix2cd m;
    m << 0.5, 0.0, 0.0, -0.5;
    return m;
}
Eigen::Matrix2cd splus() {
    Eigen::Matrix2cd m;
    m << 0.0, 1.0, 0.0, 0.0;
    return m;
}
Eigen::Matrix2cd sminus() {
    Eigen::Matrix2cd m;
    m << 0.0, 0.0, 1.0, 0.0;
    return m;
}
} // namespace spin

std::vector<int> mpo_bond_dims(const Mpo &mpo) {
    std::vector<int> dims;
    if(mpo.empty()) return dims;
    dims.push_back(mpo.front().left_dim());
    for(const auto &w : mpo) dims.push_back(w.right_dim());
    return dims;
}

Mpo build_hamiltonian_mpo(const DisorderRealization &d, HamiltonianOptions opts) {
    check_realization(d);
    const auto L = d.length;
    const double J = opts.exchange;
    Mpo mpo;
    mpo.reserve(L);
    for(std::size_t j = 0; j < L; ++j) {
        // Bulk channels: 4 = nothing placed yet, 1..3 = open exchange term, 0 = complete.
        MpoSite bulk(5, 5);
        bulk.at(done_channel, done_channel)   = spin::identity();
        bulk.at(start_channel, start_channel) = spin::identity();
        bulk.at(start_channel, done_channel)  = d.fields[j] * spin::sz();
        bulk.at(start_channel, 1)             = -0.5 * J * spin::splus();
        bulk.at(1, done_channel)              = spin::sminus();
        bulk.at(start_channel, 2)             = -0.5 * J * spin::sminus();
        bulk.at(2, done_channel)              = spin::splus();
        bulk.at(start_channel, 3)             = -J * spin::sz();
        bulk.at(3, done_channel)              = spin::sz();

        const bool first = j == 0;
        const bool last  = j + 1 == L;
        MpoSite    site(first ? 1 : 5, last ? 1 : 5);
        for(int l = 0; l < site.left_dim(); ++l)
            for(int r = 0; r < site.right_dim(); ++r) site.at(l, r) = bulk.at(first ? start_channel : l, last ? done_channel : r);
        mpo.push_back(std::move(site));
    }
    return mpo;
}

Mpo build_squared_mpo(const Mpo &h) {
    Mpo out;
    out.reserve(h.size());
    for(const auto &w : h) {
        const int dl = w.left_dim();
        const int dr = w.right_dim();
        MpoSite   sq(dl * dl, dr * dr);
        for(int l1 = 0; l1 < dl; ++l1)
            for(int r1 = 0; r1 < dr; ++r1) {
                if(w.is_zero(l1, r1)) continue;
                for(int l2 = 0; l2 < dl; ++l2)
                    for(int r2 = 0; r2 < dr; ++r2) {
                        if(w.is_zero(l2, r2)) continue;
                        sq.at(l1 * dl + l2, r1 * dr + r2) = w.at(l1, r1) * w.at(l2, r2);
                    }
            }
        out.push_back(std::move(sq));
    }
    return out;
}

Eigen::MatrixXcd mpo_to_dense(const Mpo &mpo) {
    if(mpo.empty() || mpo.size() > dense_full_max_length) throw ResourceError("mpo_to_dense limited to 1 <= L <= 12");
    // partial[r] is the operator on the sites processed so far, open channel r.
    std::vector<Eigen::MatrixXcd> partial(1, Eigen::MatrixXcd::Identity(1, 1));
    for(const auto &w : mpo) {
        std::vector<Eigen::MatrixXcd> next(static_cast<std::size_t>(w.right_dim()));
        const auto dim = partial.front().rows();
        for(auto &m : next) m = Eigen::MatrixXcd::Zero(2 * dim, 2 * dim);
        for(int l = 0; l < w.left_dim(); ++l)
            for(int r = 0; r < w.right_dim(); ++r) {
                if(w.is_zero(l, r)) continue;
                const auto &op = w.at(l, r);
                auto       &dst = next[static_cast<std::size_t>(r)];
                // New site is the least significant bit: kron(partial, op).
                for(Eigen::Index a = 0; a < dim; ++a)
                    for(Eigen::Index b = 0; b < dim; ++b) {
                        const cplx p = partial[static_cast<std::size_t>(l)](a, b);
                        if(p == cplx(0.0)) continue;
                        for(int s = 0; s < 2; ++s)
                            for(int t = 0; t < 2; ++t) dst(2 * a + s, 2 * b + t) += p * op(s, t);
                    }
            }
        partial = std::move(next);
    }
    return partial.front();
}

// ---------------------------------------------------------------------------

SectorBasis::SectorBasis(std::size_t length, int magnetization) : length_(length), magnetization_(magnetization) {
    if(length == 0 || length > 24) throw InvalidSizeError("sector basis supports 1 <= L <= 24");
    const int L = static_cast<int>(length);
    if(std::abs(magnetization) > L || (L - magnetization) % 2 != 0) throw ValidationError("magnetization not allowed for this length");
    const int downs = (L - magnetization) / 2;
    const std::uint32_t full = 1U << length;
    for(std::uint32_t idx = 0; idx < full; ++idx)
        if(std::popcount(idx) == downs) states_.push_back(idx);
}

std::ptrdiff_t SectorBasis::find(std::uint32_t full_index) const {
    const auto it = std::lower_bound(states_.begin(), states_.end(), full_index);
    if(it == states_.end() || *it != full_index) return -1;
    return it - states_.begin();
}

std::vector<int> sector_magnetizations(std::size_t length) {
    std::vector<int> out;
    const int L = static_cast<int>(length);
    for(int m = -L; m <= L; m += 2) out.push_back(m);
    return out;
}

Eigen::MatrixXd dense_hamiltonian(const DisorderRealization &d, HamiltonianOptions opts) {
    check_realization(d);
    if(d.length > dense_full_max_length) throw ResourceError("full dense Hamiltonian limited to L <= " + std::to_string(dense_full_max_length));
    const auto L   = d.length;
    const auto dim = std::size_t{1} << L;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for(std::uint64_t idx = 0; idx < dim; ++idx) {
        const auto i = static_cast<Eigen::Index>(idx);
        h(i, i) = diagonal_energy(d, idx, opts.exchange);
        for(std::size_t j = 0; j + 1 < L; ++j) {
            if(site_bit(idx, L, j) == site_bit(idx, L, j + 1)) continue;
            const std::uint64_t flipped = idx ^ (std::uint64_t{3} << (L - 2 - j));
            h(static_cast<Eigen::Index>(flipped), i) = -0.5 * opts.exchange;
        }
    }
    return h;
}

Eigen::MatrixXd dense_hamiltonian(const DisorderRealization &d, const SectorBasis &basis, HamiltonianOptions opts) {
    check_realization(d);
    if(basis.length() != d.length) throw LengthMismatchError("sector basis length does not match realization");
    if(basis.size() > dense_sector_max_dim) throw ResourceError("sector dimension " + std::to_string(basis.size()) + " exceeds dense limit");
    const auto L   = d.length;
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for(Eigen::Index i = 0; i < dim; ++i) {
        const std::uint32_t idx = basis.state(static_cast<std::size_t>(i));
        h(i, i) = diagonal_energy(d, idx, opts.exchange);
        for(std::size_t j = 0; j + 1 < L; ++j) {
            if(site_bit(idx, L, j) == site_bit(idx, L, j + 1)) continue;
            const auto flipped = idx ^ (std::uint32_t{3} << (L - 2 - j));
            h(basis.find(flipped), i) = -0.5 * opts.exchange;
        }
    }
    return h;
}

Eigen::SparseMatrix<double> sparse_hamiltonian(const DisorderRealization &d, const SectorBasis &basis, HamiltonianOptions opts) {
    check_realization(d);
    if(basis.length() != d.length) throw LengthMismatchError("sector basis length does not match realization");
    if(d.length > sparse_sector_max_length) throw ResourceError("sparse Hamiltonian limited to L <= " + std::to_string(sparse_sector_max_length));
    const auto L   = d.length;
    const auto dim = static_cast<Eigen::Index>(basis.size());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(basis.size() * (L / 2 + 1));
    for(Eigen::Index i = 0; i < dim; ++i) {
        const std::uint32_t idx = basis.state(static_cast<std::size_t>(i));
        entries.emplace_back(i, i, diagonal_energy(d, idx, opts.exchange));
        for(std::size_t j = 0; j + 1 < L; ++j) {
            if(site_bit(idx, L, j) == site_bit(idx, L, j + 1)) continue;
            const auto flipped = idx ^ (std::uint32_t{3} << (L - 2 - j));
            entries.emplace_back(basis.find(flipped), i, -0.5 * opts.exchange);
        }
    }
    Eigen::SparseMatrix<double> h(dim, dim);
    h.setFromTriplets(entries.begin(), entries.end());
    return h;
}

double classical_energy(const DisorderRealization &d, const SpinConfiguration &c, HamiltonianOptions opts) {
    if(c.size() != d.length || d.fields.size() != d.length) throw LengthMismatchError("configuration length does not match realization");
    double e = 0.0;
    for(std::size_t j = 0; j < c.size(); ++j) {
        const double s = c[j] == Spin::up ? 1.0 : -1.0;
        e += 0.5 * d.fields[j] * s;
        if(j + 1 < c.size()) e -= 0.25 * opts.exchange * s * (c[j + 1] == Spin::up ? 1.0 : -1.0);
    }
    return e;
}

} // namespace mblrevive
