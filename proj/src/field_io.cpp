#include "halfvol/field_io.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace halfvol {

namespace {

using nlohmann::json;

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

void put_f64(std::string& out, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
  char b[4];
  in.read(b, 4);
  if (!in) throw std::runtime_error("read_hvf: truncated file");
  std::uint32_t v;
  std::memcpy(&v, b, 4);
  return v;
}

double get_f64(std::istream& in) {
  char b[8];
  in.read(b, 8);
  if (!in) throw std::runtime_error("read_hvf: truncated file");
  double v;
  std::memcpy(&v, b, 8);
  return v;
}

}  // namespace

void write_hvf(const std::filesystem::path& path, const ScalarField& u,
               double eps) {
  std::string out;
  out.reserve(64 + 8 * u.size());
  out.append("HVF1", 4);
  const TorusGrid& g = u.grid();
  put_u32(out, static_cast<std::uint32_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) {
    put_u32(out, static_cast<std::uint32_t>(g.res(a)));
  }
  for (int a = 0; a < g.dim(); ++a) put_f64(out, g.side(a));
  put_f64(out, eps);
  for (double v : u.values()) put_f64(out, v);
  atomic_write(path, out);
}

HvfData read_hvf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_hvf: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "HVF1", 4) != 0) {
    throw std::runtime_error("read_hvf: bad magic in " + path.string());
  }
  const std::uint32_t dim = get_u32(in);
  if (dim < 1 || dim > 3) throw std::runtime_error("read_hvf: bad dimension");
  std::vector<int> res(dim);
  for (auto& r : res) r = static_cast<int>(get_u32(in));
  std::vector<double> sides(dim);
  for (auto& s : sides) s = get_f64(in);
  const double eps = get_f64(in);
  TorusGrid g(res, sides);
  std::vector<double> vals(g.npoints());
  for (auto& v : vals) v = get_f64(in);
  return {ScalarField(g, std::move(vals)), eps};
}

void write_voxel_family(const std::filesystem::path& path,
                        const std::vector<VoxelSet>& sets,
                        const std::string& order_name) {
  if (sets.empty()) {
    throw std::invalid_argument("write_voxel_family: no sets");
  }
  const TorusGrid& g = sets.front().grid();
  json header;
  header["dims"] = json::array();
  header["lengths"] = json::array();
  for (int a = 0; a < g.dim(); ++a) {
    header["dims"].push_back(g.res(a));
    header["lengths"].push_back(g.side(a));
  }
  header["order"] = order_name;
  header["half_volume"] = g.half_volume();
  header["count"] = sets.size();
  header["encoding"] = "rle-u32le";

  std::string out = header.dump();
  out.push_back('\n');
  for (const auto& s : sets) {
    std::vector<std::uint32_t> runs;
    bool state = false;  // runs start outside the set
    std::uint32_t len = 0;
    for (std::size_t i = 0; i < g.npoints(); ++i) {
      if (s.contains(i) == state) {
        ++len;
      } else {
        runs.push_back(len);
        state = !state;
        len = 1;
      }
    }
    runs.push_back(len);
    put_u32(out, static_cast<std::uint32_t>(runs.size()));
    for (auto r : runs) put_u32(out, r);
  }
  atomic_write(path, out);
}

VoxelFamilyData read_voxel_family(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_voxel_family: cannot open " +
                             path.string());
  }
  std::string line;
  std::getline(in, line);
  json header = json::parse(line);
  std::vector<int> res = header.at("dims").get<std::vector<int>>();
  std::vector<double> sides = header.at("lengths").get<std::vector<double>>();
  TorusGrid g(res, sides);

  VoxelFamilyData data;
  data.order_name = header.at("order").get<std::string>();
  const std::size_t count = header.at("count").get<std::size_t>();
  data.sets.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint32_t n_runs = get_u32(in);
    VoxelSet s(g);
    std::size_t pos = 0;
    bool state = false;
    for (std::uint32_t r = 0; r < n_runs; ++r) {
      const std::uint32_t len = get_u32(in);
      for (std::uint32_t i = 0; i < len; ++i, ++pos) {
        if (pos >= g.npoints()) {
          throw std::runtime_error("read_voxel_family: run overflow");
        }
        if (state) s.set(pos, true);
      }
      state = !state;
    }
    if (pos != g.npoints()) {
      throw std::runtime_error("read_voxel_family: runs do not cover grid");
    }
    data.sets.push_back(std::move(s));
  }
  return data;
}

void atomic_write(const std::filesystem::path& path,
                  const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw std::runtime_error("atomic_write: write failed for " +
                               tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace halfvol
