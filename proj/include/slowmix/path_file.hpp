#pragma once

#include <string>
#include <string_view>

#include "slowmix/structure.hpp"

namespace slowmix {

/// Hand-supplied dominating paths for networks outside the cyclic class.
///
///     [cycles]
///     2, 3          # reaction indices (0-based, network order)
///     2, 2, 3, 3
///     [excursions]
///     2, 0, 3, 3
///
/// Throws ParseError on malformed text and Error on out-of-range labels.
PathSets parse_path_file(std::string_view text, const ReactionNetwork& net);
PathSets load_path_file(const std::string& path, const ReactionNetwork& net);

std::string render_path_file(const PathSets& paths);

}  // namespace slowmix
