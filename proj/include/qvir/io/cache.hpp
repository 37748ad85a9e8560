#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qvir/errors.hpp"
#include "qvir/io/serialize.hpp"
#include "qvir/verify/relations.hpp"
#include "qvir/version.hpp"

namespace qvir::io {

inline constexpr int kCacheFormatVersion = 1;

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// One mode family stored in the cache, e.g. the NS trigonometric bilinears.
struct CacheBlock {
  std::string label;
  std::shared_ptr<verify::ModeCache> modes;
};

// File of exact normal-ordered mode operators keyed by a content hash of the
// operator-relevant configuration. A file written under another key or
// format version is refused, never reused or overwritten.
class OperatorCache {
 public:
  OperatorCache(std::string path, json key_fields) : path_(std::move(path)), fields_(std::move(key_fields)) {
    fields_["format_version"] = kCacheFormatVersion;
    key_ = hex64(fnv1a64(fields_.dump()));
  }

  const std::string& key() const { return key_; }
  const std::string& path() const { return path_; }

  // Installs cached operators into the blocks. False when no file exists.
  bool load(const std::vector<CacheBlock>& blocks) const {
    if (!std::filesystem::exists(path_)) return false;
    json doc;
    try {
      std::ifstream in(path_);
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw cache_error("unreadable cache " + path_ + ": " + e.what());
    }
    if (!doc.is_object() || doc.value("format_version", -1) != kCacheFormatVersion)
      throw cache_error("cache " + path_ + " has format version " + doc.value("format_version", json(nullptr)).dump() +
                        ", expected " + std::to_string(kCacheFormatVersion) + "; refusing to reuse it");
    if (doc.value("key", std::string()) != key_)
      throw cache_error("cache " + path_ + " was written for a different configuration (key " +
                        doc.value("key", std::string("?")) + ", this run " + key_ + "); refusing to reuse it");
    try {
      for (const auto& jb : doc.at("blocks")) {
        const auto label = jb.at("label").get<std::string>();
        auto it = std::find_if(blocks.begin(), blocks.end(), [&](const CacheBlock& b) { return b.label == label; });
        if (it == blocks.end()) throw cache_error("cache block '" + label + "' not expected by this run");
        const auto& space = it->modes->space();
        if (jb.at("dim").get<std::size_t>() != space->dim()) throw cache_error("cache block '" + label + "' has wrong dimension");
        for (const auto& jm : jb.at("modes")) {
          HalfInteger k = HalfInteger::parse(jm.at("k").get<std::string>());
          fock::GradedOperator<XLaurent> op(space, -k);
          for (const auto& jc : jm.at("columns")) {
            auto j = jc.at(0).get<std::size_t>();
            if (j >= space->dim()) throw cache_error("cache column out of range");
            fock::GradedOperator<XLaurent>::Column col;
            for (const auto& je : jc.at(1)) {
              auto i = je.at(0).get<std::uint32_t>();
              if (i >= space->dim()) throw cache_error("cache row out of range");
              col.emplace_back(i, xlaurent_from_json(je.at(1)));
            }
            op.set_column(j, std::move(col));
          }
          it->modes->insert(k, std::move(op));
        }
      }
    } catch (const json::exception& e) {
      throw cache_error("malformed cache " + path_ + ": " + e.what());
    } catch (const shape_error& e) {
      throw cache_error("cache operator violates grading: " + std::string(e.what()));
    } catch (const config_error& e) {
      throw cache_error("malformed cache " + path_ + ": " + e.what());
    }
    return true;
  }

  // Writes every operator built so far, via a temporary file and rename.
  void save(const std::vector<CacheBlock>& blocks) const {
    json doc;
    doc["format_version"] = kCacheFormatVersion;
    doc["library_version"] = kVersion;
    doc["key"] = key_;
    doc["key_fields"] = fields_;
    json jbs = json::array();
    for (const auto& b : blocks) {
      json jb;
      jb["label"] = b.label;
      jb["dim"] = b.modes->space()->dim();
      json jms = json::array();
      for (auto k : b.modes->built_modes()) {
        const auto& op = b.modes->normal(k);
        json jm;
        jm["k"] = k.to_string();
        json cols = json::array();
        for (std::size_t j = 0; j < op.dim(); ++j) {
          if (op.column(j).empty()) continue;
          json entries = json::array();
          for (const auto& [i, v] : op.column(j)) entries.push_back(json::array({i, to_json(v)}));
          cols.push_back(json::array({j, std::move(entries)}));
        }
        jm["columns"] = std::move(cols);
        jms.push_back(std::move(jm));
      }
      jb["modes"] = std::move(jms);
      jbs.push_back(std::move(jb));
    }
    doc["blocks"] = std::move(jbs);
    const std::string tmp = path_ + ".tmp";
    {
      std::ofstream out(tmp);
      if (!out) throw cache_error("cannot write cache " + tmp);
      out << doc.dump() << "\n";
      if (!out) throw cache_error("cannot write cache " + tmp);
    }
    std::filesystem::rename(tmp, path_);
  }

 private:
  std::string path_;
  json fields_;
  std::string key_;
};

}  // namespace qvir::io
