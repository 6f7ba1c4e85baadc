#pragma once

#include <stdexcept>
#include <string>

namespace wavesim {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InsufficientHistory : public Error {
 public:
  using Error::Error;
};

class DegenerateCluster : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A referenced input file does not exist or cannot be opened.
class MissingFile : public Error {
 public:
  using Error::Error;
};

class TrajectoryExhausted : public Error {
 public:
  using Error::Error;
};

class CollisionError : public Error {
 public:
  CollisionError(const std::string& what, int follower_id, double time)
      : Error(what), follower_id_(follower_id), time_(time) {}

  int follower_id() const { return follower_id_; }
  double time() const { return time_; }

 private:
  int follower_id_;
  double time_;
};

}  // namespace wavesim
