#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fl {

inline constexpr const char* kVersion = "0.1.0";

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/** Base class for all library errors. */
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** A direction argument was (numerically) the zero vector. */
struct ZeroVectorError : Error {
  using Error::Error;
};

/** A constructor or setter received parameters outside its domain. */
struct BadParameterError : Error {
  using Error::Error;
};

/** A finite-difference stencil crossed a region where the operator degenerates. */
struct DegenerateRegionError : Error {
  using Error::Error;
};

/** An iterative procedure stopped before reaching its target accuracy. */
struct ConvergenceError : Error {
  using Error::Error;
};

/** A scalar argument lies outside the attainable range (e.g. level above the max). */
struct RangeError : Error {
  using Error::Error;
};

/** A bracketed root finder failed to locate a sign change. */
struct RootFindError : Error {
  using Error::Error;
};

/** Tabulated boundary data does not describe a valid convex body around 0. */
struct BoundaryError : Error {
  using Error::Error;
};

/** log(1 + e^z), stable against overflow for large positive z. */
double softplus(double z);

/** Surface measure of the unit sphere S^{n-1}. */
double sphere_area(int n);

/** Lebesgue volume of the unit ball in R^n. */
double ball_volume(int n);

/** Tree (pairwise) summation; deterministic and O(log n) error growth. */
double pairwise_sum(const double* x, std::size_t n);
double pairwise_sum(const std::vector<double>& x);

/** 64-bit finalizer-style mixing function. */
std::uint64_t mix64(std::uint64_t z);

/**
 * Counter-based generator: every variate is a pure function of
 * (seed, stream, counter), so parallel partitions can draw independent,
 * reproducible streams without shared state.
 */
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  /** Uniform variate in the open interval (0,1) at the given counter. */
  double u01(std::uint64_t ctr) const;

  /** Standard normal variate; consumes counters 2*ctr and 2*ctr+1 internally. */
  double gauss(std::uint64_t ctr) const;

  /** Uniform unit vector in R^n; consumes gauss counters [idx*n, (idx+1)*n). */
  Vec sphere(int n, std::uint64_t idx) const;

 private:
  std::uint64_t key_;
};

/** Deterministic quasi-uniform set of `count` unit vectors in R^n. */
std::vector<Vec> sphere_grid(int n, int count);

/** Low-discrepancy (Kronecker) unit-vector sequence for sphere quadrature. */
std::vector<Vec> sphere_qmc(int n, std::size_t count);

/** Worker count: FL_THREADS if set (clamped to >=1), else the hardware count. */
int thread_count();

/**
 * Runs fn(b) for every b in [0, blocks) on up to thread_count() workers.
 * The block decomposition is fixed by the caller, so storing per-block results
 * and reducing them in block order is bit-stable under any thread count.
 */
void parallel_blocks(int blocks, const std::function<void(int)>& fn);

/** Root of a continuous f on [a,b] with f(a)*f(b) <= 0, to absolute xtol. */
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol);

/** Gauss-Legendre nodes and weights on [-1,1] (Golub-Welsch). */
void gauss_legendre(int k, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace fl
