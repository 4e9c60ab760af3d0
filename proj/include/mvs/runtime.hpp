#pragma once

namespace mvs {

/// Keeps freed multi-megabyte field buffers in the heap instead of returning
/// them to the OS, so the solver's temporaries do not page-fault on every
/// allocation. Process-wide; call once from main.
void tune_allocator();

}  // namespace mvs
