#pragma once

#include <string>

#include "hymem/types.hpp"

namespace hymem {

// Builds an ImageRef for a uri. The digest is the SHA-256 of the file bytes
// when the uri names a readable local file, otherwise of the uri string
// itself (remote and synthetic uris stay deterministic without fetching).
ImageRef make_image_ref(const std::string& uri);

std::array<uint8_t, 32> sha256_bytes(std::string_view data);

}  // namespace hymem
