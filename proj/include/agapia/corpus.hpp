#pragma once

// Texts of corpus/ compiled into the library.
namespace agapia::corpus {
extern const char* const termination_agapia;
extern const char* const termination_sthl;
}  // namespace agapia::corpus
