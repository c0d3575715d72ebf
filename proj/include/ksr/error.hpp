#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ksr {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class parallel_input : public error {
public:
  parallel_input() : error("conj_cross: input vectors are parallel") {}
};

class zero_vector : public error {
public:
  zero_vector() : error("zero vector has no ray") {}
};

class divergence_guard : public error {
public:
  explicit divergence_guard(std::size_t cap)
      : error("closure exceeded " + std::to_string(cap) + " rays"), cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

private:
  std::size_t cap_;
};

class non_triangle_clique : public error {
public:
  using error::error;
};

class parse_error : public error {
public:
  parse_error(std::size_t line, const std::string &what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class duplicate_ray : public error {
public:
  duplicate_ray(std::size_t line, std::size_t first)
      : error("line " + std::to_string(line) + ": duplicate of ray " +
              std::to_string(first)),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class zero_inner_product : public error {
public:
  zero_inner_product() : error("forbidden phases need a nonzero inner product") {}
};

class invalid_k : public error {
public:
  explicit invalid_k(long long k)
      : error("K=" + std::to_string(k) + " must be positive and coprime to 6"), k_(k) {}
  long long k() const noexcept { return k_; }

private:
  long long k_;
};

class search_exhausted : public error {
public:
  search_exhausted(long long k, const std::string &strategy)
      : error("phase search '" + strategy + "' exhausted for K=" + std::to_string(k)),
        k_(k) {}
  long long k() const noexcept { return k_; }

private:
  long long k_;
};

class precision_disagreement : public error {
public:
  using error::error;
};

class size_mismatch : public error {
public:
  using error::error;
};

class inconsistent_certificates : public error {
public:
  using error::error;
};

} // namespace ksr
