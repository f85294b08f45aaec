#pragma once

namespace zalms {

/// Library version, embedded in run manifests so outputs are traceable.
inline constexpr char version[] = "0.1.0";

} // namespace zalms
