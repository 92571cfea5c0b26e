#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace natalia::service {

struct Document {
  std::string id;
  std::uint64_t version = 0;  // 1 after creation, +1 per write
  nlohmann::json body;
};

/// A conditional write. expected_version 0 means "must not exist yet".
struct Write {
  std::string collection;
  std::string id;
  std::uint64_t expected_version = 0;
  nlohmann::json body;
};

/// Versioned JSON documents grouped in collections. Implementations are
/// thread-safe. Ids and collection names are limited to [A-Za-z0-9._-].
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;

  virtual std::optional<Document> get(std::string_view collection, std::string_view id) const = 0;

  /// All documents of a collection, ordered by id.
  virtual std::vector<Document> list(std::string_view collection) const = 0;

  /// Applies every write or none. Returns false, writing nothing, when any
  /// expected_version does not match. Throws Error{StorageFailure} on I/O
  /// errors, Error{InvalidArgument} on malformed names.
  virtual bool commit(std::span<const Write> writes) = 0;

  bool commit(const Write& w) { return commit(std::span<const Write>(&w, 1)); }
};

class MemoryDocumentStore : public DocumentStore {
 public:
  using DocumentStore::commit;
  std::optional<Document> get(std::string_view collection, std::string_view id) const override;
  std::vector<Document> list(std::string_view collection) const override;
  bool commit(std::span<const Write> writes) override;

 protected:
  using Collection = std::map<std::string, Document, std::less<>>;

  /// Called with the lock held after the versions checked out, before the
  /// cache is updated. `docs` carries the new versions.
  virtual void persist(std::span<const Write> writes, std::span<const Document> docs);

  mutable std::mutex mutex_;
  std::map<std::string, Collection, std::less<>> data_;
};

/// One JSON file per document under root/<collection>/<id>.json, replaced by
/// atomic rename. Multi-document commits go through a journal that is
/// replayed on open, so a crash mid-commit never leaves a partial batch.
class FileDocumentStore : public MemoryDocumentStore {
 public:
  explicit FileDocumentStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

 protected:
  void persist(std::span<const Write> writes, std::span<const Document> docs) override;

 private:
  void replay_journal();
  void load();

  std::filesystem::path root_;
};

/// Opaque byte blobs addressed by slash-separated keys.
class BlobStore {
 public:
  virtual ~BlobStore() = default;

  /// Overwrites. Throws Error{StorageFailure}.
  virtual void put(std::string_view key, std::span<const std::uint8_t> bytes) = 0;
  virtual std::optional<std::vector<std::uint8_t>> get(std::string_view key) const = 0;
  virtual bool exists(std::string_view key) const = 0;
  virtual void remove(std::string_view key) = 0;
  /// All keys, sorted.
  virtual std::vector<std::string> keys() const = 0;
};

class MemoryBlobStore : public BlobStore {
 public:
  void put(std::string_view key, std::span<const std::uint8_t> bytes) override;
  std::optional<std::vector<std::uint8_t>> get(std::string_view key) const override;
  bool exists(std::string_view key) const override;
  void remove(std::string_view key) override;
  std::vector<std::string> keys() const override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<std::uint8_t>, std::less<>> blobs_;
};

class FileBlobStore : public BlobStore {
 public:
  explicit FileBlobStore(std::filesystem::path root);

  void put(std::string_view key, std::span<const std::uint8_t> bytes) override;
  std::optional<std::vector<std::uint8_t>> get(std::string_view key) const override;
  bool exists(std::string_view key) const override;
  void remove(std::string_view key) override;
  std::vector<std::string> keys() const override;

 private:
  std::filesystem::path path_for(std::string_view key) const;

  std::filesystem::path root_;
};

/// Accepts a non-empty [A-Za-z0-9._-] segment that is not "." or "..".
bool is_valid_name(std::string_view name) noexcept;

/// Writes to a sibling temp file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace natalia::service
