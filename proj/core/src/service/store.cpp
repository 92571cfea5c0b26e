#include "natalia/service/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>

#include "natalia/common/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace natalia::service {

bool is_valid_name(std::string_view name) noexcept {
  if (name.empty() || name == "." || name == "..") return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

namespace {

void require_name(std::string_view name, const char* what) {
  if (!is_valid_name(name)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("invalid ") + what + " '" + std::string(name) + "'");
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::StorageFailure, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void fsync_path(const fs::path& path, int flags) {
  const int fd = ::open(path.c_str(), flags);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

std::atomic<std::uint64_t> temp_counter{0};

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view contents) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  const auto tmp = path.parent_path() /
                   ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()) + "-" +
                    std::to_string(temp_counter.fetch_add(1)));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(ErrorCode::StorageFailure, "cannot write " + tmp.string());
    }
  }
  fsync_path(tmp, O_RDONLY);
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::StorageFailure, "cannot rename into " + path.string());
  }
  fsync_path(path.parent_path(), O_RDONLY | O_DIRECTORY);
}

// ---------------------------------------------------------------- memory docs

std::optional<Document> MemoryDocumentStore::get(std::string_view collection,
                                                 std::string_view id) const {
  std::lock_guard lock(mutex_);
  auto c = data_.find(collection);
  if (c == data_.end()) return std::nullopt;
  auto d = c->second.find(id);
  if (d == c->second.end()) return std::nullopt;
  return d->second;
}

std::vector<Document> MemoryDocumentStore::list(std::string_view collection) const {
  std::lock_guard lock(mutex_);
  std::vector<Document> out;
  auto c = data_.find(collection);
  if (c == data_.end()) return out;
  out.reserve(c->second.size());
  for (const auto& [id, doc] : c->second) out.push_back(doc);
  return out;
}

bool MemoryDocumentStore::commit(std::span<const Write> writes) {
  for (const auto& w : writes) {
    require_name(w.collection, "collection");
    require_name(w.id, "document id");
  }
  std::lock_guard lock(mutex_);
  std::vector<Document> docs;
  docs.reserve(writes.size());
  for (std::size_t i = 0; i < writes.size(); ++i) {
    const auto& w = writes[i];
    for (std::size_t k = 0; k < i; ++k) {
      if (writes[k].collection == w.collection && writes[k].id == w.id) {
        throw Error(ErrorCode::InvalidArgument, "document " + w.id + " written twice in one commit");
      }
    }
    std::uint64_t current = 0;
    if (auto c = data_.find(w.collection); c != data_.end()) {
      if (auto d = c->second.find(w.id); d != c->second.end()) current = d->second.version;
    }
    if (current != w.expected_version) return false;
    docs.push_back(Document{w.id, current + 1, w.body});
  }
  persist(writes, docs);
  for (std::size_t i = 0; i < writes.size(); ++i) {
    data_[writes[i].collection].insert_or_assign(writes[i].id, std::move(docs[i]));
  }
  return true;
}

void MemoryDocumentStore::persist(std::span<const Write>, std::span<const Document>) {}

// ------------------------------------------------------------------ file docs

namespace {

json stored_form(const Document& d) {
  return json{{"id", d.id}, {"version", d.version}, {"body", d.body}};
}

}  // namespace

FileDocumentStore::FileDocumentStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot create " + root_.string());
  replay_journal();
  load();
}

void FileDocumentStore::persist(std::span<const Write> writes, std::span<const Document> docs) {
  if (writes.size() == 1) {
    write_file_atomic(root_ / writes[0].collection / (writes[0].id + ".json"),
                      stored_form(docs[0]).dump());
    return;
  }
  json journal = json::array();
  for (std::size_t i = 0; i < writes.size(); ++i) {
    journal.push_back(json{{"collection", writes[i].collection}, {"doc", stored_form(docs[i])}});
  }
  const auto journal_path = root_ / "journal.json";
  write_file_atomic(journal_path, journal.dump());
  for (std::size_t i = 0; i < writes.size(); ++i) {
    write_file_atomic(root_ / writes[i].collection / (writes[i].id + ".json"),
                      stored_form(docs[i]).dump());
  }
  std::error_code ec;
  fs::remove(journal_path, ec);
}

void FileDocumentStore::replay_journal() {
  const auto journal_path = root_ / "journal.json";
  if (!fs::exists(journal_path)) return;
  json journal;
  try {
    journal = json::parse(read_text(journal_path));
  } catch (const json::exception&) {
    // A journal is renamed into place only once complete, so a torn one
    // cannot exist; treat parse failure as corruption.
    throw Error(ErrorCode::StorageFailure, "unreadable journal in " + root_.string());
  }
  for (const auto& entry : journal) {
    const auto collection = entry.at("collection").get<std::string>();
    const auto& doc = entry.at("doc");
    write_file_atomic(root_ / collection / (doc.at("id").get<std::string>() + ".json"), doc.dump());
  }
  fs::remove(journal_path);
}

void FileDocumentStore::load() {
  for (const auto& dir : fs::directory_iterator(root_)) {
    if (!dir.is_directory() || !is_valid_name(dir.path().filename().string())) continue;
    auto& collection = data_[dir.path().filename().string()];
    for (const auto& file : fs::directory_iterator(dir.path())) {
      const auto name = file.path().filename().string();
      if (name.starts_with(".") || file.path().extension() != ".json") continue;
      try {
        const auto j = json::parse(read_text(file.path()));
        Document d{j.at("id").get<std::string>(), j.at("version").get<std::uint64_t>(),
                   j.at("body")};
        collection.insert_or_assign(d.id, std::move(d));
      } catch (const json::exception& e) {
        throw Error(ErrorCode::StorageFailure,
                    "unreadable document " + file.path().string() + ": " + e.what());
      }
    }
  }
}

// -------------------------------------------------------------- memory blobs

namespace {

void require_key(std::string_view key) {
  if (key.empty()) throw Error(ErrorCode::InvalidArgument, "empty blob key");
  std::size_t start = 0;
  while (start <= key.size()) {
    const auto slash = key.find('/', start);
    const auto end = slash == std::string_view::npos ? key.size() : slash;
    require_name(key.substr(start, end - start), "blob key segment");
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
}

}  // namespace

void MemoryBlobStore::put(std::string_view key, std::span<const std::uint8_t> bytes) {
  require_key(key);
  std::lock_guard lock(mutex_);
  blobs_.insert_or_assign(std::string(key), std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
}

std::optional<std::vector<std::uint8_t>> MemoryBlobStore::get(std::string_view key) const {
  std::lock_guard lock(mutex_);
  auto it = blobs_.find(key);
  if (it == blobs_.end()) return std::nullopt;
  return it->second;
}

bool MemoryBlobStore::exists(std::string_view key) const {
  std::lock_guard lock(mutex_);
  return blobs_.find(key) != blobs_.end();
}

void MemoryBlobStore::remove(std::string_view key) {
  std::lock_guard lock(mutex_);
  if (auto it = blobs_.find(key); it != blobs_.end()) blobs_.erase(it);
}

std::vector<std::string> MemoryBlobStore::keys() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [k, v] : blobs_) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------- file blobs

FileBlobStore::FileBlobStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot create " + root_.string());
}

fs::path FileBlobStore::path_for(std::string_view key) const {
  require_key(key);
  return root_ / fs::path(std::string(key));
}

void FileBlobStore::put(std::string_view key, std::span<const std::uint8_t> bytes) {
  write_file_atomic(path_for(key),
                    std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::optional<std::vector<std::uint8_t>> FileBlobStore::get(std::string_view key) const {
  const auto path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::StorageFailure, "cannot read " + path.string());
  return out;
}

bool FileBlobStore::exists(std::string_view key) const {
  std::error_code ec;
  return fs::is_regular_file(path_for(key), ec);
}

void FileBlobStore::remove(std::string_view key) {
  std::error_code ec;
  fs::remove(path_for(key), ec);
}

std::vector<std::string> FileBlobStore::keys() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root_)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.starts_with(".")) continue;
    out.push_back(fs::relative(entry.path(), root_).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace natalia::service
