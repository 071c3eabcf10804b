#include "stochgm/simbatch_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <ostream>

#include "stochgm/error.hpp"
#include "stochgm/types.hpp"

namespace stochgm {

static_assert(std::endian::native == std::endian::little,
              "SimBatch files are little-endian; add byte swapping for this target");

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'G', 'M', 'B', 'A', 'T', 'C', 'H'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(Errc::io_error, "truncated SimBatch file");
  return value;
}

}  // namespace

void write_simbatch(std::ostream& out, const SimBatch& batch) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, batch.engine == Engine::temporal ? 0U : 1U);
  put<std::uint64_t>(out, batch.size());
  put<std::uint64_t>(out, batch.length());
  put<double>(out, batch.dt);
  put<std::uint64_t>(out, batch.seed);
  const auto& p = batch.params;
  for (double v : {p.log_ai, p.d595, p.t_mid, p.omega_mid, p.omega_rate, p.zeta_f, p.fc_hz, p.t_total}) {
    put<double>(out, v);
  }
  std::vector<double> column(batch.size());
  for (Eigen::Index j = 0; j < batch.realizations.cols(); ++j) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      column[i] = batch.realizations(static_cast<Eigen::Index>(i), j);
    }
    out.write(reinterpret_cast<const char*>(column.data()),
              static_cast<std::streamsize>(column.size() * sizeof(double)));
  }
  if (!out) throw Error(Errc::io_error, "failed writing SimBatch");
}

SimBatch read_simbatch(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(Errc::io_error, "not a SimBatch file");
  if (get<std::uint32_t>(in) != kVersion) throw Error(Errc::io_error, "unsupported SimBatch version");
  SimBatch batch;
  batch.engine = get<std::uint32_t>(in) == 0 ? Engine::temporal : Engine::spectral;
  const auto n = get<std::uint64_t>(in);
  const auto m = get<std::uint64_t>(in);
  batch.dt = get<double>(in);
  batch.seed = get<std::uint64_t>(in);
  auto& p = batch.params;
  for (double* v : {&p.log_ai, &p.d595, &p.t_mid, &p.omega_mid, &p.omega_rate, &p.zeta_f, &p.fc_hz,
                    &p.t_total}) {
    *v = get<double>(in);
  }
  batch.realizations.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  std::vector<double> column(n);
  for (std::uint64_t j = 0; j < m; ++j) {
    in.read(reinterpret_cast<char*>(column.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw Error(Errc::io_error, "truncated SimBatch data");
    for (std::uint64_t i = 0; i < n; ++i) {
      batch.realizations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = column[i];
    }
  }
  return batch;
}

void save_simbatch(const std::filesystem::path& path, const SimBatch& batch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  write_simbatch(out, batch);
}

SimBatch load_simbatch(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  return read_simbatch(in);
}

void write_simbatch_csv(std::ostream& out, const SimBatch& batch) {
  const auto old_precision = out.precision(9);
  out << "t_s";
  for (std::size_t i = 0; i < batch.size(); ++i) out << ",r" << i;
  out << '\n';
  for (std::size_t j = 0; j < batch.length(); ++j) {
    out << static_cast<double>(j) * batch.dt;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      out << ',' << batch.realizations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    out << '\n';
  }
  out.precision(old_precision);
}

void write_spectrum_csv(std::ostream& out, const ResponseSpectrum& spectrum) {
  const auto old_precision = out.precision(9);
  out << "# damping=" << spectrum.damping << '\n' << "T_s,Sa_g\n";
  for (std::size_t j = 0; j < spectrum.periods.size(); ++j) {
    out << spectrum.periods[j] << ',' << spectrum.sa[j] / kGravity << '\n';
  }
  out.precision(old_precision);
}

}  // namespace stochgm
