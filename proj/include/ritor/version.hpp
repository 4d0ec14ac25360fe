#ifndef RITOR_VERSION_HPP
#define RITOR_VERSION_HPP

namespace ritor {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
