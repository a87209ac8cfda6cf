#include "cbs/snapshot_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "cbs/data.hpp"

namespace cbs {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
    std::uint32_t v;
    in.read(reinterpret_cast<char*>(&v), 4);
    if (!in) throw FormatError(path + ": truncated snapshot file");
    return v;
}

}  // namespace

void save_params(const ParamSet& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out.write("CBS1", 4);
    for (const auto& [name, tensor] : params) {
        write_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(out, static_cast<std::uint32_t>(tensor.rank()));
        for (std::size_t d : tensor.shape()) write_u32(out, static_cast<std::uint32_t>(d));
        out.write(reinterpret_cast<const char*>(tensor.data()),
                  static_cast<std::streamsize>(tensor.numel() * sizeof(double)));
    }
    if (!out) throw FormatError(path + ": write failed");
}

ParamSet load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "CBS1", 4) != 0)
        throw FormatError(path + ": bad magic, not a CBS1 snapshot");

    ParamSet params;
    while (true) {
        std::uint32_t name_len;
        in.read(reinterpret_cast<char*>(&name_len), 4);
        if (in.eof()) break;
        if (!in) throw FormatError(path + ": truncated snapshot file");
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const std::uint32_t rank = read_u32(in, path);
        std::vector<std::size_t> shape(rank);
        std::size_t numel = 1;
        for (std::uint32_t i = 0; i < rank; ++i) {
            shape[i] = read_u32(in, path);
            numel *= shape[i];
        }
        std::vector<double> data(numel);
        in.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(numel * sizeof(double)));
        if (!in) throw FormatError(path + ": truncated snapshot file");
        params.add(std::move(name), Tensor(std::move(shape), std::move(data)));
    }
    return params;
}

}  // namespace cbs
