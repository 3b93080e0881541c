#pragma once

#include <stdexcept>
#include <string>

namespace mellin_qfe {

//! Invalid argument supplied by the caller (empty sample, mismatched grids).
class argument_error : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! Parameter outside the region where a quantity is defined.
class domain_error : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

//! A numerical evaluation produced a non-finite value.
class numeric_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! |M_c[g](t)| vanished (numerically) inside the integration range.
class ill_posed_error : public numeric_error
{
public:
  using numeric_error::numeric_error;
};

//! A required moment of Y is infinite.
class moment_error : public domain_error
{
public:
  using domain_error::domain_error;
};

//! A file could not be read or written.
class io_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace mellin_qfe
