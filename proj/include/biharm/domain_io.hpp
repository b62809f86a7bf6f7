#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "biharm/domain.hpp"

namespace biharm {

// Domain spec files are line-oriented `key = value` documents:
//
//   # comment
//   name      = l_shape          (optional)
//   dimension = 2
//   cell_size = 1.0
//   offset    = (0, 0)           (optional, defaults to the origin)
//   cells     = (0,0) (1,0)
//   cells     = (0,1)            (repeated keys append)
//
// Errors are reported as ParseError with "line N:" prefixes.

DomainDescription parse_domain_spec(std::string_view text);
DomainDescription read_domain_file(const std::filesystem::path& path);
std::string format_domain_spec(const DomainDescription& spec);

}  // namespace biharm
