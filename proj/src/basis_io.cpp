#include "benard/basis_io.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "benard/error.hpp"

namespace benard {

static_assert(std::endian::native == std::endian::little, "file I/O assumes a little-endian host");

namespace {

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  }
  template <class T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put(const double* p, std::size_t n) {
    out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  }
  void header(std::uint32_t kind) {
    out_.write("BNRD", 4);
    put<std::uint32_t>(kFileVersion);
    put<std::uint32_t>(kind);
  }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  }
  template <class T>
  T get() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw std::runtime_error(fmt::format("'{}' is truncated", path_));
    return v;
  }
  void get(double* p, std::size_t n) {
    in_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in_) throw std::runtime_error(fmt::format("'{}' is truncated", path_));
  }
  void header(std::uint32_t kind) {
    char magic[4];
    in_.read(magic, 4);
    if (!in_ || std::memcmp(magic, "BNRD", 4) != 0)
      throw std::runtime_error(fmt::format("'{}' is not a BNRD file", path_));
    const auto version = get<std::uint32_t>();
    if (version != kFileVersion)
      throw std::runtime_error(fmt::format("'{}' has unsupported version {}", path_, version));
    const auto k = get<std::uint32_t>();
    if (k != kind) throw std::runtime_error(fmt::format("'{}' holds kind {}, expected {}", path_, k, kind));
  }

 private:
  std::ifstream in_;
  std::string path_;
};

void put_column(Writer& w, const Eigen::MatrixXd& m, int c) { w.put(m.col(c).data(), m.rows()); }

}  // namespace

void save_basis(const GalerkinBasis& basis, const std::string& path) {
  Writer w(path);
  w.header(kKindBasis);
  const auto& spec = basis.spec();
  const auto& vq = basis.vertical();
  const int nz = vq.size();
  w.put<double>(basis.domain().length);
  w.put<std::uint32_t>(basis.grid_x1());
  w.put<std::uint32_t>(spec.max_k1);
  w.put<std::uint32_t>(spec.max_k2);
  w.put<std::uint32_t>(spec.velocity_modes);
  w.put<std::uint32_t>(spec.bc == BoundaryMode::FreeSlip ? 0 : 1);
  w.put<std::uint32_t>(spec.profile_resolution);
  w.put<std::uint32_t>(nz);
  w.put(vq.nodes.data(), nz);
  w.put(vq.weights.data(), nz);
  const auto& v = basis.velocity();
  w.put<std::uint32_t>(v.size());
  for (int i = 0; i < v.size(); ++i) {
    w.put<std::int32_t>(v.labels[i].k1);
    w.put<std::int32_t>(v.labels[i].index);
    w.put<double>(v.eigenvalues[i]);
    put_column(w, v.profile1, i);
    put_column(w, v.dz_profile1, i);
    put_column(w, v.profile2, i);
    put_column(w, v.dz_profile2, i);
  }
  const auto& t = basis.temperature();
  w.put<std::uint32_t>(t.size());
  for (int i = 0; i < t.size(); ++i) {
    w.put<std::int32_t>(t.labels[i].k1);
    w.put<std::int32_t>(t.labels[i].index);
    w.put<double>(t.eigenvalues[i]);
    put_column(w, t.profile1, i);
    put_column(w, t.dz_profile1, i);
  }
  w.close();
}

GalerkinBasis load_basis(const std::string& path) {
  Reader r(path);
  r.header(kKindBasis);
  Domain domain;
  BasisSpec spec;
  domain.length = r.get<double>();
  domain.grid_x1 = static_cast<int>(r.get<std::uint32_t>());
  spec.max_k1 = static_cast<int>(r.get<std::uint32_t>());
  spec.max_k2 = static_cast<int>(r.get<std::uint32_t>());
  spec.velocity_modes = static_cast<int>(r.get<std::uint32_t>());
  spec.bc = r.get<std::uint32_t>() == 0 ? BoundaryMode::FreeSlip : BoundaryMode::NoSlip;
  spec.profile_resolution = static_cast<int>(r.get<std::uint32_t>());
  const int nz = static_cast<int>(r.get<std::uint32_t>());
  domain.grid_x2 = spec.bc == BoundaryMode::FreeSlip ? nz - 1 : nz;
  VerticalQuadrature vq;
  vq.nodes.resize(nz);
  vq.weights.resize(nz);
  r.get(vq.nodes.data(), nz);
  r.get(vq.weights.data(), nz);

  auto read_set = [&](bool vector) {
    ModeSet s;
    s.vector_valued = vector;
    const int n = static_cast<int>(r.get<std::uint32_t>());
    s.eigenvalues.resize(n);
    s.profile1.resize(nz, n);
    s.dz_profile1.resize(nz, n);
    if (vector) {
      s.profile2.resize(nz, n);
      s.dz_profile2.resize(nz, n);
    }
    for (int i = 0; i < n; ++i) {
      ModeLabel label;
      label.k1 = r.get<std::int32_t>();
      label.index = r.get<std::int32_t>();
      s.labels.push_back(label);
      s.harmonic.push_back(std::abs(label.k1));
      s.parity.push_back(label.k1 < 0 ? 1 : 0);
      s.eigenvalues[i] = r.get<double>();
      r.get(s.profile1.col(i).data(), nz);
      r.get(s.dz_profile1.col(i).data(), nz);
      if (vector) {
        r.get(s.profile2.col(i).data(), nz);
        r.get(s.dz_profile2.col(i).data(), nz);
      }
    }
    return s;
  };
  auto velocity = read_set(true);
  auto temperature = read_set(false);
  return GalerkinBasis(domain, spec, std::move(vq), std::move(velocity), std::move(temperature));
}

GalerkinBasis cached_basis(const Domain& domain, const BasisSpec& spec, const std::string& path) {
  if (std::filesystem::exists(path)) {
    try {
      auto cached = load_basis(path);
      const auto& cs = cached.spec();
      const int res = spec.bc == BoundaryMode::NoSlip && spec.profile_resolution == 0
                          ? auto_profile_resolution(spec)
                          : spec.profile_resolution;
      const int gx1 = domain.grid_x1 ? domain.grid_x1 : required_grid_x1(spec.max_k1);
      const int gx2 = domain.grid_x2 ? domain.grid_x2 : required_grid_x2(spec);
      if (cached.domain().length == domain.length && cs.max_k1 == spec.max_k1 &&
          cs.max_k2 == spec.max_k2 && cs.velocity_modes == spec.velocity_modes && cs.bc == spec.bc &&
          cs.profile_resolution == res && cached.grid_x1() == gx1 && cached.domain().grid_x2 == gx2)
        return cached;
    } catch (const std::runtime_error&) {
      // unreadable or stale cache: rebuild below
    }
  }
  auto basis = GalerkinBasis::build(domain, spec);
  save_basis(basis, path);
  return basis;
}

void save_snapshots(const Snapshots& snaps, const std::string& path) {
  Writer w(path);
  w.header(kKindSnapshots);
  w.put<std::uint32_t>(snaps.velocity_size);
  w.put<std::uint32_t>(snaps.temperature_size);
  w.put<std::uint64_t>(snaps.times.size());
  const std::size_t n = static_cast<std::size_t>(snaps.velocity_size + snaps.temperature_size);
  for (std::size_t i = 0; i < snaps.times.size(); ++i) {
    if (static_cast<std::size_t>(snaps.states[i].size()) != n)
      throw ShapeError("snapshot state size does not match the header");
    w.put<double>(snaps.times[i]);
    w.put(snaps.states[i].data(), n);
  }
  w.close();
}

Snapshots load_snapshots(const std::string& path) {
  Reader r(path);
  r.header(kKindSnapshots);
  Snapshots s;
  s.velocity_size = static_cast<int>(r.get<std::uint32_t>());
  s.temperature_size = static_cast<int>(r.get<std::uint32_t>());
  const auto count = r.get<std::uint64_t>();
  const int n = s.velocity_size + s.temperature_size;
  for (std::uint64_t i = 0; i < count; ++i) {
    s.times.push_back(r.get<double>());
    Eigen::VectorXd v(n);
    r.get(v.data(), static_cast<std::size_t>(n));
    s.states.push_back(std::move(v));
  }
  return s;
}

}  // namespace benard
