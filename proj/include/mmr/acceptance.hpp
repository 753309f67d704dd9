#pragma once

#include <iosfwd>

namespace mmr {

// Runs the full acceptance suite, printing one pass/fail line per criterion.
// Returns the number of failed criteria.
int run_acceptance(std::ostream& out, int threads = 1);

} // namespace mmr
