#pragma once

#include <stdexcept>
#include <string>

namespace tablerag {

// Root of every error the library throws. Subclasses exist so callers and
// tests can discriminate failure kinds without parsing messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error { using Error::Error; };
class IndexOutOfRange : public Error { using Error::Error; };

// ingest
class NotAZip : public Error { using Error::Error; };
class MissingDocumentPart : public Error { using Error::Error; };
class MalformedXml : public Error { using Error::Error; };
class SchemaViolation : public Error { using Error::Error; };
class InvalidDocument : public Error { using Error::Error; };

// embed
class EmptyText : public Error {
 public:
  explicit EmptyText(std::size_t index)
      : Error("empty text at index " + std::to_string(index)), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)),
        expected_(expected),
        got_(got) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t got() const noexcept { return got_; }

 private:
  std::size_t expected_;
  std::size_t got_;
};

class NoTokens : public Error { using Error::Error; };
class ZeroVector : public Error { using Error::Error; };
class RemoteUnavailable : public Error { using Error::Error; };
// The service answered but rejected the request or broke the wire protocol.
class RemoteError : public Error { using Error::Error; };

// index
class DuplicateChunkId : public Error { using Error::Error; };
class EmptyIndex : public Error { using Error::Error; };
class CorruptIndexFile : public Error { using Error::Error; };

// eval
class DuplicateQid : public Error { using Error::Error; };
class UnknownChunkId : public Error { using Error::Error; };
class GoldTableMissing : public Error {
 public:
  GoldTableMissing(std::string qid, std::string table_id)
      : Error("question " + qid + " references missing table " + table_id),
        qid_(std::move(qid)),
        table_id_(std::move(table_id)) {}
  const std::string& qid() const noexcept { return qid_; }
  const std::string& table_id() const noexcept { return table_id_; }

 private:
  std::string qid_;
  std::string table_id_;
};

class EmptyCorpus : public Error { using Error::Error; };

}  // namespace tablerag
