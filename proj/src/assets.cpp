#include "ptomo/assets.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "ptomo/design.hpp"
#include "ptomo/error.hpp"
#include "ptomo/matrix_io.hpp"

namespace ptomo {

namespace {

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string expected_checksum(const std::string& relative) {
  std::istringstream sums(read_all(data_dir() + "/SHA256SUMS"));
  std::string line;
  while (std::getline(sums, line)) {
    std::istringstream ls(line);
    std::string digest, name;
    if (ls >> digest >> name && name == relative) return digest;
  }
  throw Error(ErrorKind::kIo, "no checksum recorded for data asset '" + relative + "'");
}

}  // namespace

std::string data_dir() {
  if (const char* env = std::getenv("PTOMO_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return PTOMO_DATA_DIR;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
    throw Error(ErrorKind::kInternalConsistency, "sha256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_all(path)); }

CMat load_verified_matrix(const std::string& relative) {
  const std::string path = data_dir() + "/" + relative;
  const std::string bytes = read_all(path);
  const std::string want = expected_checksum(relative);
  if (sha256_hex(bytes) != want) throw Error(ErrorKind::kIo, "checksum mismatch for data asset '" + relative + "'");
  return parse_matrix_text(bytes);
}

CMat builtin_device_matrix(const std::string& name) {
  if (name == "u7") return load_verified_matrix("u7.txt");
  throw_invalid("unknown builtin device '" + name + "'");
}

CMat published_family_matrix(const std::vector<int>& subset) {
  return load_verified_matrix("povm/M" + subset_label(subset) + ".txt");
}

}  // namespace ptomo
