#include "gfred/codec.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <json.hpp>
#include <zlib.h>

#include "gfred/error.hpp"

namespace gfred {

StorageBudget StorageBudget::compute(std::int64_t n, std::int64_t D, std::int64_t k,
                                     std::int64_t L) {
  StorageBudget b{n, D, k, L};
  b.stored_scalars = k * (L + 1) * D + 2 * k * n + n * (n + 1) / 2;
  b.raw_scalars = n * D;
  b.pca_scalars = k * D + k * n;
  return b;
}

double compression_bound_value(std::int64_t n, std::int64_t D, std::int64_t L) {
  const double denom = 2.0 * n + static_cast<double>(L + 1) * D;
  if (!(denom > 0.0)) throw Error(Errc::InvalidArgument, "bound denominator must be positive");
  return n * (D - 0.5 * (n + 1)) / denom;
}

std::int64_t compression_bound(std::int64_t n, std::int64_t D, std::int64_t L) {
  if (n < 1 || D < 1 || L < 0)
    throw Error(Errc::InvalidArgument, "bound needs n >= 1, D >= 1, L >= 0");
  // stored < raw  <=>  k (2n + (L+1)D) < nD - n(n+1)/2
  const std::int64_t per_k = 2 * n + (L + 1) * D;
  const std::int64_t slack = n * D - n * (n + 1) / 2;
  if (slack <= 0) return 0;
  return (slack - 1) / per_k;
}

ReducedData to_spectral(const ReducedData& reduced, const GraphSpectrum& spectrum) {
  if (reduced.domain == Domain::Spectral) return reduced;
  return {gft(reduced.Y, spectrum), Domain::Spectral};
}

ReducedData to_vertex(const ReducedData& reduced, const GraphSpectrum& spectrum) {
  if (reduced.domain == Domain::Vertex) return reduced;
  return {igft(reduced.Y, spectrum), Domain::Vertex};
}

namespace {

void check_fingerprint(const FilterModel& model, const GraphSpectrum& spectrum) {
  if (model.spectrum_fingerprint != spectrum_fingerprint(spectrum))
    throw Error(Errc::FingerprintMismatch, "model was trained on a different graph spectrum");
}

}  // namespace

ReducedData reduce(const FilterModel& model, const CenteredDataset& ds,
                   const GraphSpectrum& spectrum, const SpectralCache& cache) {
  check_fingerprint(model, spectrum);
  if (cache.L != model.L || cache.n() != ds.n() || cache.D() != ds.D())
    throw Error(Errc::DimensionMismatch, "cache does not match model and dataset");
  const Eigen::MatrixXd codes = spectral_codes(cache, model.G);
  return {igft(codes, spectrum), Domain::Vertex};
}

Eigen::MatrixXd reconstruct(const FilterModel& model, const ReducedData& reduced,
                            const GraphSpectrum& spectrum) {
  check_fingerprint(model, spectrum);
  if (reduced.Y.rows() != model.k || reduced.Y.cols() != spectrum.n())
    throw Error(Errc::DimensionMismatch, "codes must be k x n");
  const ReducedData spectral = to_spectral(reduced, spectrum);
  const Eigen::MatrixXd pow = eigenvalue_powers(spectrum.lambda, model.L);
  Eigen::MatrixXd X = igft(apply_response(pow, model.B, spectral.Y), spectrum);
  X.colwise() += model.mean;
  return X;
}

double reconstruction_mse(const FilterModel& model, const CenteredDataset& ds,
                          const GraphSpectrum& spectrum, const SpectralCache& cache) {
  const Eigen::MatrixXd Xhat = reconstruct(model, reduce(model, ds, spectrum, cache), spectrum);
  const Eigen::MatrixXd residual = ds.Xbar - (Xhat.colwise() - model.mean);
  return residual.squaredNorm() / static_cast<double>(ds.n());
}

TapStack reducing_taps(const Eigen::MatrixXd& G, const SpectralCache& cache) {
  TapStack C(static_cast<std::size_t>(cache.L + 1));
  for (int l = 0; l <= cache.L; ++l)
    C[l] = (G * cache.lambda_pow.col(l).asDiagonal()) * cache.Xtilde.transpose();
  return C;
}

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

// sum_l (S^l (x) I_out)(I_n (x) T_l) vec(X), reshaped to out x n.
Eigen::MatrixXd kron_filter(const Eigen::MatrixXd& S, const TapStack& taps,
                            const Eigen::MatrixXd& X) {
  const Eigen::Index n = S.rows();
  if (taps.empty()) throw Error(Errc::InvalidArgument, "empty tap stack");
  const Eigen::Index out_dim = taps[0].rows();
  const Eigen::Index in_dim = taps[0].cols();
  if (X.rows() != in_dim || X.cols() != n)
    throw Error(Errc::DimensionMismatch, "Kronecker filter input has the wrong shape");

  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(X.data(), X.size());
  const Eigen::MatrixXd I_out = Eigen::MatrixXd::Identity(out_dim, out_dim);
  const Eigen::MatrixXd I_n = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd S_pow = I_n;  // S^0 = I, including for the zero matrix
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n * out_dim, n * in_dim);
  for (std::size_t l = 0; l < taps.size(); ++l) {
    op += kron(S_pow, I_out) * kron(I_n, taps[l]);
    S_pow = S_pow * S;
  }
  const Eigen::VectorXd y = op * x;
  return Eigen::Map<const Eigen::MatrixXd>(y.data(), out_dim, n);
}

}  // namespace

Eigen::MatrixXd kron_reduce(const Eigen::MatrixXd& S, const TapStack& C,
                            const Eigen::MatrixXd& Xbar) {
  return kron_filter(S, C, Xbar);
}

Eigen::MatrixXd kron_reconstruct(const Eigen::MatrixXd& S, const TapStack& B,
                                 const Eigen::MatrixXd& Y) {
  return kron_filter(S, B, Y);
}

// ---- .gfm persistence ------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'G', 'F', 'M', '1'};
constexpr int kVersion = 1;

void put_f64(std::string& out, const double* data, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(data[i]);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
  }
}

class PayloadReader {
 public:
  explicit PayloadReader(const std::string& bytes) : bytes_(bytes) {}

  void read(double* data, Eigen::Index count) {
    if (pos_ + static_cast<std::size_t>(count) * 8 > bytes_.size())
      throw Error(Errc::CorruptFile, "payload shorter than the header dimensions imply");
    for (Eigen::Index i = 0; i < count; ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b]))
                << (8 * b);
      data[i] = std::bit_cast<double>(bits);
      pos_ += 8;
    }
  }

  bool exhausted() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(const std::string& bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()),
              static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void save_model(const std::filesystem::path& path, const FilterModel& model,
                const GraphSpectrum& spectrum, const Eigen::MatrixXd& Y) {
  const Eigen::Index n = spectrum.n();
  const Eigen::Index D = model.mean.size();
  if (Y.rows() != model.k || Y.cols() != n || model.G.cols() != n ||
      model.B.size() != static_cast<std::size_t>(model.L + 1))
    throw Error(Errc::DimensionMismatch, "model, spectrum and codes disagree");

  std::string payload;
  put_f64(payload, model.mean.data(), D);
  put_f64(payload, spectrum.lambda.data(), n);
  put_f64(payload, spectrum.U.data(), n * n);
  for (const auto& tap : model.B) put_f64(payload, tap.data(), tap.size());
  put_f64(payload, model.G.data(), model.G.size());
  put_f64(payload, Y.data(), Y.size());

  const StorageBudget budget = StorageBudget::compute(n, D, model.k, model.L);
  nlohmann::json header = {{"version", kVersion},
                           {"n", n},
                           {"D", D},
                           {"k", model.k},
                           {"L", model.L},
                           {"stored_scalars", budget.stored_scalars},
                           {"checksum", crc32_of(payload)}};
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int b = 0; b < 4; ++b) out.put(static_cast<char>((len >> (8 * b)) & 0xFF));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error(Errc::IoError, "failed writing " + path.string());
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(Errc::CorruptFile, "missing GFM1 magic");
  std::uint32_t len = 0;
  for (int b = 0; b < 4; ++b)
    len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 + b])) << (8 * b);
  if (bytes.size() < 8 + static_cast<std::size_t>(len))
    throw Error(Errc::CorruptFile, "truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(8, len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptFile, std::string("unreadable header: ") + e.what());
  }

  std::int64_t n = 0, D = 0, k = 0, L = 0, stored = 0;
  std::uint32_t checksum = 0;
  int version = 0;
  try {
    version = header.at("version").get<int>();
    n = header.at("n").get<std::int64_t>();
    D = header.at("D").get<std::int64_t>();
    k = header.at("k").get<std::int64_t>();
    L = header.at("L").get<std::int64_t>();
    stored = header.at("stored_scalars").get<std::int64_t>();
    checksum = header.at("checksum").get<std::uint32_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptFile, std::string("bad header field: ") + e.what());
  }
  if (version != kVersion)
    throw Error(Errc::VersionMismatch, "unsupported model version " + std::to_string(version));
  if (n < 1 || D < 1 || k < 1 || L < 0 || n > (1 << 20) || D > (1 << 26) || k > D || L > 1024)
    throw Error(Errc::CorruptFile, "implausible header dimensions");

  StoredModel result;
  result.budget = StorageBudget::compute(n, D, k, L);
  if (stored != result.budget.stored_scalars)
    throw Error(Errc::CorruptFile, "stored_scalars does not match the dimensions");

  const std::string payload = bytes.substr(8 + len);
  const std::int64_t expected = 8 * (D + n + n * n + (L + 1) * D * k + 2 * k * n);
  if (static_cast<std::int64_t>(payload.size()) != expected)
    throw Error(Errc::CorruptFile, "payload has " + std::to_string(payload.size()) +
                                       " bytes, expected " + std::to_string(expected));
  if (crc32_of(payload) != checksum) throw Error(Errc::CorruptFile, "checksum mismatch");

  PayloadReader reader(payload);
  FilterModel& m = result.model;
  m.L = static_cast<int>(L);
  m.k = static_cast<int>(k);
  m.mean.resize(D);
  reader.read(m.mean.data(), D);
  result.spectrum.lambda.resize(n);
  reader.read(result.spectrum.lambda.data(), n);
  result.spectrum.U.resize(n, n);
  reader.read(result.spectrum.U.data(), n * n);
  m.B.assign(static_cast<std::size_t>(L + 1), Eigen::MatrixXd(D, k));
  for (auto& tap : m.B) reader.read(tap.data(), tap.size());
  m.G.resize(k, n);
  reader.read(m.G.data(), m.G.size());
  result.Y.resize(k, n);
  reader.read(result.Y.data(), result.Y.size());

  const auto& U = result.spectrum.U;
  result.spectrum.S = U * result.spectrum.lambda.asDiagonal() * U.transpose();
  m.spectrum_fingerprint = spectrum_fingerprint(result.spectrum);
  return result;
}

}  // namespace gfred
