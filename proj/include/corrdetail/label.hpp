#pragma once

#include <string>

#include "corrdetail/error.hpp"

namespace corrdetail {

enum class Label { real, fake };

inline std::string label_to_string(Label l) { return l == Label::fake ? "fake" : "real"; }

inline Label label_from_string(const std::string& s) {
    if (s == "fake") return Label::fake;
    if (s == "real") return Label::real;
    throw DataError("label must be \"real\" or \"fake\", got \"" + s + "\"");
}

} // namespace corrdetail
