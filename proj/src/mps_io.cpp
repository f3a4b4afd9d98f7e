#include "mblrevive/mps_io.hpp"

#include "mblrevive/errors.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <json.hpp>

namespace mblrevive {

static_assert(std::endian::native == std::endian::little, "tensor files are written in native little-endian order");

namespace fs = std::filesystem;

void save_mps(const Mps &psi, const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if(ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    nlohmann::json manifest;
    manifest["schema_version"] = mps_schema_version;
    manifest["L"]              = psi.size();
    manifest["bond_dims"]      = psi.bond_dims();
    manifest["dtype"]          = "c128";
    if(psi.charges()) manifest["charges"] = *psi.charges();
    if(psi.center()) manifest["center"] = *psi.center();
    std::vector<std::string> files;
    for(std::size_t j = 0; j < psi.size(); ++j) {
        char name[32];
        std::snprintf(name, sizeof name, "site_%04zu.bin", j);
        files.emplace_back(name);
        const auto &t = psi.site(j);
        std::vector<double> buf;
        buf.reserve(static_cast<std::size_t>(4 * t[0].size()));
        for(Eigen::Index a = 0; a < t[0].rows(); ++a)
            for(int s = 0; s < 2; ++s)
                for(Eigen::Index b = 0; b < t[0].cols(); ++b) {
                    const cplx v = t[static_cast<std::size_t>(s)](a, b);
                    buf.push_back(v.real());
                    buf.push_back(v.imag());
                }
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char *>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
        if(!out) throw IoError("failed writing " + (dir / name).string());
    }
    manifest["tensor_files"] = files;
    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    out << manifest.dump(2) << '\n';
    if(!out) throw IoError("failed writing " + (dir / "manifest.json").string());
}

Mps load_mps(const fs::path &dir) {
    std::ifstream in(dir / "manifest.json");
    if(!in) throw IoError("missing " + (dir / "manifest.json").string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch(const nlohmann::json::exception &e) {
        throw IoError("malformed manifest in " + dir.string() + ": " + e.what());
    }
    if(manifest.value("schema_version", 0) != mps_schema_version) throw IoError("unsupported MPS schema version in " + dir.string());
    if(manifest.value("dtype", std::string()) != "c128") throw IoError("unsupported dtype in " + dir.string());
    const auto L     = manifest.at("L").get<std::size_t>();
    const auto dims  = manifest.at("bond_dims").get<std::vector<Eigen::Index>>();
    const auto files = manifest.at("tensor_files").get<std::vector<std::string>>();
    if(dims.size() != L + 1 || files.size() != L) throw IoError("inconsistent manifest in " + dir.string());

    std::vector<SiteTensor> sites(L);
    for(std::size_t j = 0; j < L; ++j) {
        const Eigen::Index left = dims[j], right = dims[j + 1];
        std::vector<double> buf(static_cast<std::size_t>(4 * left * right));
        std::ifstream       f(dir / files[j], std::ios::binary);
        f.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
        if(!f || f.peek() != std::char_traits<char>::eof()) throw IoError("tensor file has wrong size: " + (dir / files[j]).string());
        auto &t = sites[j];
        t[0]    = Eigen::MatrixXcd(left, right);
        t[1]    = Eigen::MatrixXcd(left, right);
        std::size_t p = 0;
        for(Eigen::Index a = 0; a < left; ++a)
            for(int s = 0; s < 2; ++s)
                for(Eigen::Index b = 0; b < right; ++b, p += 2) t[static_cast<std::size_t>(s)](a, b) = cplx(buf[p], buf[p + 1]);
    }
    std::optional<BondCharges> charges;
    if(manifest.contains("charges")) charges = manifest["charges"].get<BondCharges>();
    std::optional<std::size_t> center;
    if(manifest.contains("center")) center = manifest["center"].get<std::size_t>();
    try {
        return Mps(std::move(sites), std::move(charges), center);
    } catch(const ValidationError &e) {
        throw IoError("invalid MPS in " + dir.string() + ": " + e.what());
    }
}

} // namespace mblrevive
