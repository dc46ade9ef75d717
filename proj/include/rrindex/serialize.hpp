#pragma once

#include <string>
#include <string_view>

#include "rrindex/index_state.hpp"

namespace rrindex {

// Binary index image, version 1, little endian, trailing checksum. The
// layout is deterministic: saving a loaded image reproduces it byte for
// byte. Throws DataError on malformed input.
std::string save_index_bytes(const Index& ix);
Index load_index_bytes(std::string_view bytes);

void save_index(const Index& ix, const std::string& path);
Index load_index(const std::string& path);

} // namespace rrindex
