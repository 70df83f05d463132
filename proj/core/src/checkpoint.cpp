#include "fsrec/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "fsrec/errors.hpp"

namespace fsrec {
namespace {

constexpr std::array<char, 8> kMagic = {'F', 'S', 'R', 'E', 'C', 'F', 'A', 'C'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) throw IoError("truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
  }
}

Eigen::MatrixXd get_matrix(std::istream& in, std::uint64_t rows, std::uint64_t cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get<double>(in);
  }
  return m;
}

}  // namespace

void write_checkpoint(std::ostream& out, const LatentFactors& factors, ScalarMode mode, std::uint64_t seed) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, factors.num_users());
  put<std::uint64_t>(out, factors.num_items());
  put<std::uint64_t>(out, factors.latent_dim());
  put<std::uint8_t>(out, mode == ScalarMode::kBinary ? 0 : 1);
  put<std::uint64_t>(out, seed);
  put_matrix(out, factors.S);
  put_matrix(out, factors.V);
  if (!out) throw IoError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw IoError("not an fsrec factor checkpoint");
  if (get<std::uint32_t>(in) != kVersion) throw IoError("unsupported checkpoint version");
  Checkpoint cp;
  cp.header.num_users = get<std::uint64_t>(in);
  cp.header.num_items = get<std::uint64_t>(in);
  cp.header.latent_dim = get<std::uint64_t>(in);
  const auto mode = get<std::uint8_t>(in);
  if (mode > 1) throw IoError("bad scalar mode in checkpoint");
  cp.header.scalar_mode = mode == 0 ? ScalarMode::kBinary : ScalarMode::kTagCount;
  cp.header.seed = get<std::uint64_t>(in);
  cp.factors.S = get_matrix(in, cp.header.latent_dim, cp.header.num_users);
  cp.factors.V = get_matrix(in, cp.header.latent_dim, cp.header.num_items);
  if (in.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes after checkpoint payload");
  return cp;
}

void write_checkpoint(const std::string& path, const LatentFactors& factors, ScalarMode mode, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_checkpoint(out, factors, mode, seed);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_checkpoint(in);
}

void write_metadata(std::ostream& out, const std::map<std::string, std::string>& meta) {
  for (const auto& [k, v] : meta) out << k << " = " << v << '\n';
}

std::map<std::string, std::string> read_metadata(std::istream& in) {
  std::map<std::string, std::string> meta;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    meta[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return meta;
}

}  // namespace fsrec
