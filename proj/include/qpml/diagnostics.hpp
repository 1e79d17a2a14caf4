#pragma once

#include <string>
#include <vector>

namespace qpml {

/// Process-wide verbosity: 0 prints warnings only, 1 adds per-stage notes,
/// 2 adds per-layer detail.
void set_verbosity(int level);
int verbosity();

/// Warnings go to stderr and are also kept so reports can list them.
void warn(const std::string& message);
void note(int level, const std::string& message);
std::vector<std::string> take_warnings();

}  // namespace qpml
