#ifndef COVERMECH_PARALLEL_HPP
#define COVERMECH_PARALLEL_HPP

namespace covermech {

// Kernels that have an OpenMP version keep the plain loop next to it; the
// serial path is the reference the tests compare against.
enum class Exec { serial, parallel };

/// OpenMP team size, capped by the COVERMECH_THREADS environment variable.
int worker_threads();

}  // namespace covermech

#endif  // COVERMECH_PARALLEL_HPP
