#pragma once
#include <string>

namespace ibpf::io {

// write to a sibling temp file, then rename over the target
void atomic_write(const std::string& path, const std::string& content);

// %.17g, with integral values still carrying a decimal point
std::string format_double(double v);

}  // namespace ibpf::io
