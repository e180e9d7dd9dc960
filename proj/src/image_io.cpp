#include "hymem/image_io.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>

namespace hymem {

std::array<uint8_t, 32> sha256_bytes(std::string_view data) {
  std::array<uint8_t, 32> digest{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr);
  return digest;
}

ImageRef make_image_ref(const std::string& uri) {
  ImageRef image;
  image.uri = uri;
  std::error_code ec;
  if (std::filesystem::is_regular_file(uri, ec) && !ec) {
    std::ifstream in(uri, std::ios::binary);
    if (in) {
      std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      image.content_hash = sha256_bytes(bytes);
      return image;
    }
  }
  image.content_hash = sha256_bytes(uri);
  return image;
}

}  // namespace hymem
