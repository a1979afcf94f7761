#include "pdw/io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pdw {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

// Compact SHA-256 (FIPS 180-4), enough for content digests of output files.
struct Sha256 {
    std::array<std::uint32_t, 8> h{0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                                   0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
    std::array<std::uint8_t, 64> block{};
    std::size_t block_len = 0;
    std::uint64_t total_len = 0;

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void compress(const std::uint8_t* p) {
        static constexpr std::uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
            0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
            0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
            0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
            0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
            0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
            0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
            0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
            0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                   (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto a = h;
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t s1 = rotr(a[4], 6) ^ rotr(a[4], 11) ^ rotr(a[4], 25);
            const std::uint32_t ch = (a[4] & a[5]) ^ (~a[4] & a[6]);
            const std::uint32_t t1 = a[7] + s1 + ch + k[i] + w[i];
            const std::uint32_t s0 = rotr(a[0], 2) ^ rotr(a[0], 13) ^ rotr(a[0], 22);
            const std::uint32_t maj = (a[0] & a[1]) ^ (a[0] & a[2]) ^ (a[1] & a[2]);
            const std::uint32_t t2 = s0 + maj;
            a[7] = a[6]; a[6] = a[5]; a[5] = a[4]; a[4] = a[3] + t1;
            a[3] = a[2]; a[2] = a[1]; a[1] = a[0]; a[0] = t1 + t2;
        }
        for (int i = 0; i < 8; ++i) h[static_cast<std::size_t>(i)] += a[static_cast<std::size_t>(i)];
    }

    void update(const std::uint8_t* data, std::size_t len) {
        total_len += len;
        while (len > 0) {
            const std::size_t take = std::min(len, block.size() - block_len);
            std::memcpy(block.data() + block_len, data, take);
            block_len += take;
            data += take;
            len -= take;
            if (block_len == block.size()) {
                compress(block.data());
                block_len = 0;
            }
        }
    }

    std::string finish() {
        const std::uint64_t bits = total_len * 8;
        const std::uint8_t one = 0x80;
        update(&one, 1);
        const std::uint8_t zero = 0x00;
        while (block_len != 56) update(&zero, 1);
        std::uint8_t len_be[8];
        for (int i = 0; i < 8; ++i) len_be[i] = std::uint8_t(bits >> (56 - 8 * i));
        update(len_be, 8);
        char out[65];
        for (int i = 0; i < 8; ++i)
            std::snprintf(out + 8 * i, 9, "%08x", h[static_cast<std::size_t>(i)]);
        return std::string(out, 64);
    }
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    Sha256 s;
    s.update(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
    return s.finish();
}

void atomic_write_file(const std::string& path, std::string_view content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("rename failed: " + path);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

namespace {

void append_raster_rows(std::string& out, const RegionRaster& raster, bool rotated) {
    const GridSpec& g = raster.spec;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t idx = raster.index(i, j);
            const SectionPoint c = g.cell_center(i, j);
            const double x = rotated ? c.theta1 + c.dtheta1 : c.theta1;
            const double y = rotated ? c.theta1 - c.dtheta1 : c.dtheta1;
            const std::uint8_t l = raster.labels[idx];
            out += format_g17(x);
            out += ',';
            out += format_g17(y);
            out += ',';
            out += std::to_string(raster.survival[idx]);
            out += ',';
            out += (l & kLabelInD) ? '1' : '0';
            out += ',';
            out += (l & kLabelInS1D) ? '1' : '0';
            out += ',';
            out += (l & kLabelInS2D) ? '1' : '0';
            out += ',';
            out += (l & kLabelInB) ? '1' : '0';
            out += '\n';
        }
    }
}

}  // namespace

std::string raster_to_csv(const RegionRaster& raster) {
    std::string out = "theta1,dtheta1,survival,in_D,in_S1D,in_S2D,in_B\n";
    out.reserve(raster.survival.size() * 48 + out.size());
    append_raster_rows(out, raster, /*rotated=*/false);
    return out;
}

std::string raster_to_rotated_csv(const RegionRaster& raster) {
    std::string out = "theta1_plus_dtheta1,theta1_minus_dtheta1,survival,in_D,in_S1D,in_S2D,in_B\n";
    out.reserve(raster.survival.size() * 48 + out.size());
    append_raster_rows(out, raster, /*rotated=*/true);
    return out;
}

std::string raster_to_pgm(const RegionRaster& raster) {
    const GridSpec& g = raster.spec;
    std::string out = "P5\n" + std::to_string(g.nx) + " " + std::to_string(g.ny) + "\n255\n";
    out.reserve(out.size() + raster.survival.size());
    for (int j = g.ny - 1; j >= 0; --j)
        for (int i = 0; i < g.nx; ++i)
            out.push_back(static_cast<char>(
                static_cast<std::uint8_t>(std::min<std::uint16_t>(raster.survival[raster.index(i, j)], 255))));
    return out;
}

std::string raster_metadata_json(const RegionRaster& raster) {
    nlohmann::ordered_json j;
    j["toolkit_version"] = kToolkitVersion;
    j["gamma"] = raster.meta.gamma;
    j["grid"] = {{"theta1_lo", raster.spec.theta1_lo}, {"theta1_hi", raster.spec.theta1_hi},
                 {"dtheta1_lo", raster.spec.dtheta1_lo}, {"dtheta1_hi", raster.spec.dtheta1_hi},
                 {"nx", raster.spec.nx}, {"ny", raster.spec.ny}};
    j["integrator"] = {{"rel_tol", raster.meta.cfg.rel_tol}, {"abs_tol", raster.meta.cfg.abs_tol},
                       {"max_step", raster.meta.cfg.max_step}, {"t_max", raster.meta.cfg.t_max},
                       {"theta1_fall_limit", raster.meta.cfg.theta1_fall_limit}};
    j["n_max"] = raster.meta.n_max;
    if (raster.meta.n_long > 0) {
        j["basin_protocol"] = {{"n_short", raster.meta.n_short}, {"n_long", raster.meta.n_long},
                               {"violations", raster.meta.protocol_violations}};
    }
    j["supersampled"] = raster.meta.supersampled;
    j["workers"] = raster.meta.workers;
    return j.dump(2) + "\n";
}

std::string RunManifest::parameter_digest() const {
    std::string blob = command;
    for (const auto& [k, v] : parameters) {
        blob += '\n';
        blob += k;
        blob += '=';
        blob += v;
    }
    return sha256_hex(blob);
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["toolkit_version"] = kToolkitVersion;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : parameters) params[k] = v;
    j["parameters"] = params;
    j["parameter_digest"] = parameter_digest();
    j["workers"] = workers;
    j["wall_time_s"] = wall_time_s;
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto& o : outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
    j["outputs"] = outs;
    return j.dump(2) + "\n";
}

void write_output(RunManifest& manifest, const std::string& path, std::string_view content) {
    atomic_write_file(path, content);
    manifest.outputs.push_back({path, sha256_hex(content)});
}

}  // namespace pdw
