#pragma once

namespace ustat {

/// Worker threads used by parallel loops (1 without OpenMP). Results do not
/// depend on this setting.
int max_threads();
void set_threads(int count);

}  // namespace ustat
