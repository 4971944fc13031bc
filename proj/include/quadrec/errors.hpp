// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace quadrec {

// Input data is unusable (bad files, unknown labels, inconsistent models).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The caller asked for something invalid (bad arguments, missing parameters).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public DataError {
 public:
  EmptyInput() : DataError("EmptyInput: no taggings given") {}
};

class MissingProfile : public DataError {
 public:
  explicit MissingProfile(std::string user)
      : DataError("MissingProfile: user '" + user + "' has no demographics entry"),
        user_(std::move(user)) {}
  const std::string& user() const { return user_; }

 private:
  std::string user_;
};

class InvalidIndex : public DataError {
 public:
  InvalidIndex(const std::string& dimension, std::uint64_t index, std::size_t table_size)
      : DataError("InvalidIndex: " + dimension + " index " + std::to_string(index) +
                  " out of range (table size " + std::to_string(table_size) + ")") {}
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& reason)
      : DataError("ParseError: " + source + ":" + std::to_string(line) + ": " + reason),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnknownLabel : public DataError {
 public:
  UnknownLabel(const std::string& dimension, const std::string& label)
      : DataError("UnknownLabel: no " + dimension + " named '" + label + "'") {}
};

class UnknownUser : public DataError {
 public:
  explicit UnknownUser(const std::string& label)
      : DataError("UnknownUser: no user named '" + label + "'") {}
};

class UnbucketableAge : public DataError {
 public:
  UnbucketableAge(const std::string& user, int age)
      : DataError("UnbucketableAge: user '" + user + "' has age " + std::to_string(age) +
                  " outside every configured bucket") {}
};

class TooLarge : public DataError {
 public:
  explicit TooLarge(const std::string& what) : DataError("TooLarge: " + what) {}
};

class EmptyRecommendation : public DataError {
 public:
  EmptyRecommendation()
      : DataError("EmptyRecommendation: precision is undefined on an empty list") {}
};

class MissingResource : public UsageError {
 public:
  MissingResource() : UsageError("MissingResource: tag suggestion requires a resource") {}
};

}  // namespace quadrec
