#include <zlib.h>

#include <cstring>
#include <fstream>

#include "hymem/memory_graph.hpp"

namespace hymem {

namespace {

constexpr char kMagic[4] = {'H', 'Y', 'M', 'G'};
constexpr uint32_t kSchemaVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  put_u32(out, static_cast<uint32_t>(v & 0xffffffffULL));
  put_u32(out, static_cast<uint32_t>(v >> 32));
}

void put_i64(std::string& out, int64_t v) { put_u64(out, static_cast<uint64_t>(v)); }

void put_f32(std::string& out, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  put_u32(out, bits);
}

void put_str(std::string& out, const std::string& s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out.append(s);
}

void put_floats(std::string& out, const std::vector<float>& v) {
  for (float f : v) put_f32(out, f);
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  uint32_t u32() {
    need(4);
    uint32_t v = static_cast<uint8_t>(data_[pos_]) |
                 (static_cast<uint32_t>(static_cast<uint8_t>(data_[pos_ + 1])) << 8) |
                 (static_cast<uint32_t>(static_cast<uint8_t>(data_[pos_ + 2])) << 16) |
                 (static_cast<uint32_t>(static_cast<uint8_t>(data_[pos_ + 3])) << 24);
    pos_ += 4;
    return v;
  }

  uint64_t u64() {
    uint64_t lo = u32();
    uint64_t hi = u32();
    return lo | (hi << 32);
  }

  int64_t i64() { return static_cast<int64_t>(u64()); }

  float f32() {
    uint32_t bits = u32();
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
  }

  std::string str() {
    uint32_t len = u32();
    need(len);
    std::string s(data_.substr(pos_, len));
    pos_ += len;
    return s;
  }

  std::vector<float> floats(size_t count) {
    std::vector<float> v(count);
    for (size_t i = 0; i < count; ++i) v[i] = f32();
    return v;
  }

  void raw(uint8_t* dst, size_t count) {
    need(count);
    std::memcpy(dst, data_.data() + pos_, count);
    pos_ += count;
  }

  bool exhausted() const { return pos_ == data_.size(); }

 private:
  void need(size_t count) {
    if (pos_ + count > data_.size()) {
      throw CorruptSnapshot("snapshot truncated at offset " + std::to_string(pos_));
    }
  }

  std::string_view data_;
  size_t pos_ = 0;
};

uint32_t crc_of(std::string_view body) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(body.data()),
              static_cast<uInt>(body.size()));
  return static_cast<uint32_t>(crc);
}

void write_node(std::string& body, const MemoryNode& node, const StoreParams& params) {
  put_str(body, node.node_id);
  put_str(body, node.strategy);
  put_str(body, node.task_text);
  put_str(body, node.domain_tag);
  put_str(body, node.first_screenshot.uri);
  body.append(reinterpret_cast<const char*>(node.first_screenshot.content_hash.data()),
              node.first_screenshot.content_hash.size());
  put_u32(body, static_cast<uint32_t>(node.attributes.size()));
  for (const AttributeTag& tag : node.attributes) put_str(body, tag.text);
  put_str(body, node.embedding.encoder_id);
  for (uint32_t i = 0; i < params.block_len; ++i) put_floats(body, node.embedding.vectors[i]);
  put_floats(body, node.semantic.text_part);
  put_floats(body, node.semantic.image_part);
  put_u64(body, node.merge_count);
  put_str(body, node.replaced_from);
  put_u32(body, static_cast<uint32_t>(node.source_trajectory_ids.size()));
  for (const std::string& sid : node.source_trajectory_ids) put_str(body, sid);
  put_i64(body, node.created_at);
  put_i64(body, node.updated_at);
}

MemoryNode read_node(ByteReader& r, const StoreParams& params) {
  MemoryNode node;
  node.node_id = r.str();
  node.strategy = r.str();
  node.task_text = r.str();
  node.domain_tag = r.str();
  node.first_screenshot.uri = r.str();
  r.raw(node.first_screenshot.content_hash.data(), node.first_screenshot.content_hash.size());
  uint32_t n_attr = r.u32();
  for (uint32_t i = 0; i < n_attr; ++i) node.attributes.insert(AttributeTag{r.str()});
  node.embedding.encoder_id = r.str();
  node.embedding.vectors.reserve(params.block_len);
  for (uint32_t i = 0; i < params.block_len; ++i) {
    node.embedding.vectors.push_back(r.floats(params.block_dim));
  }
  node.semantic.text_part = r.floats(params.text_dim);
  node.semantic.image_part = r.floats(params.image_dim);
  node.merge_count = r.u64();
  node.replaced_from = r.str();
  uint32_t n_src = r.u32();
  for (uint32_t i = 0; i < n_src; ++i) node.source_trajectory_ids.push_back(r.str());
  node.created_at = r.i64();
  node.updated_at = r.i64();
  return node;
}

}  // namespace

void MemoryGraph::save_snapshot(const std::filesystem::path& path) const {
  std::string body;
  {
    std::shared_lock lock(mu_);
    put_u32(body, params_.text_dim);
    put_u32(body, params_.image_dim);
    put_u32(body, params_.block_dim);
    put_u32(body, params_.block_len);
    put_u64(body, version_);
    put_u64(body, next_node_seq_);
    put_u64(body, merge_total_);
    put_u64(body, replace_total_);
    put_u64(body, nodes_.size());
    for (const auto& [id, node] : nodes_) write_node(body, node, params_);
  }

  std::string file;
  file.append(kMagic, sizeof(kMagic));
  put_u32(file, kSchemaVersion);
  put_u32(file, crc_of(body));
  put_u64(file, body.size());
  file.append(body);

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(file.data(), static_cast<std::streamsize>(file.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string());
}

std::unique_ptr<MemoryGraph> MemoryGraph::load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (file.size() < 20) throw CorruptSnapshot("snapshot smaller than its header");
  if (std::memcmp(file.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CorruptSnapshot(path.string() + " is not a memory graph snapshot");
  }
  ByteReader header(std::string_view(file).substr(4, 16));
  uint32_t schema = header.u32();
  if (schema != kSchemaVersion) {
    throw SchemaVersionMismatch("snapshot schema " + std::to_string(schema) +
                                " is not supported (expected " +
                                std::to_string(kSchemaVersion) + ")");
  }
  uint32_t expect_crc = header.u32();
  uint64_t body_len = header.u64();
  std::string_view body = std::string_view(file).substr(20);
  if (body.size() != body_len) throw CorruptSnapshot("snapshot body length mismatch");
  if (crc_of(body) != expect_crc) throw CorruptSnapshot("snapshot checksum mismatch");

  ByteReader r(body);
  StoreParams params;
  params.text_dim = r.u32();
  params.image_dim = r.u32();
  params.block_dim = r.u32();
  params.block_len = r.u32();

  auto graph = std::make_unique<MemoryGraph>(params);
  graph->version_ = r.u64();
  graph->next_node_seq_ = r.u64();
  graph->merge_total_ = r.u64();
  graph->replace_total_ = r.u64();
  uint64_t node_count = r.u64();
  for (uint64_t i = 0; i < node_count; ++i) {
    MemoryNode node = read_node(r, params);
    try {
      node.validate(params);
    } catch (const Error& e) {
      throw CorruptSnapshot("invalid node in snapshot: " + std::string(e.what()));
    }
    if (graph->nodes_.count(node.node_id)) {
      throw CorruptSnapshot("duplicate node id in snapshot: " + node.node_id);
    }
    graph->index_.upsert(node.node_id, node.semantic);
    graph->index_tags(node);
    for (const std::string& sid : node.source_trajectory_ids) graph->lineage_.insert(sid);
    std::string id = node.node_id;
    graph->nodes_.emplace(std::move(id), std::move(node));
  }
  if (!r.exhausted()) throw CorruptSnapshot("trailing bytes after the last node record");
  return graph;
}

}  // namespace hymem
