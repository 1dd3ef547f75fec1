#pragma once

namespace xform {

inline constexpr char kVersion[] = "0.1.0";

}  // namespace xform
