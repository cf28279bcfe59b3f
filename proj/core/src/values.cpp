// Copyright 2026 The Contractile Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "contractile/values.hpp"

#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace contractile {

namespace {

struct SymTable {
  std::mutex mu;
  std::unordered_map<std::string, SymId> ids;
  std::vector<std::string> names;
};

SymTable& sym_table() {
  static SymTable* t = new SymTable();
  return *t;
}

struct EnumInfo {
  std::string name;
  std::vector<std::string> tags;
};

struct EnumTable {
  std::mutex mu;
  std::unordered_map<std::string, EnumTypeId> ids;
  std::vector<EnumInfo> infos;
};

EnumTable& enum_table() {
  static EnumTable* t = new EnumTable();
  return *t;
}

}  // namespace

SymId intern(const std::string& s) {
  auto& t = sym_table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.ids.find(s);
  if (it != t.ids.end()) return it->second;
  SymId id = static_cast<SymId>(t.names.size());
  t.names.push_back(s);
  t.ids.emplace(s, id);
  return id;
}

const std::string& sym_name(SymId id) {
  auto& t = sym_table();
  std::lock_guard<std::mutex> lock(t.mu);
  return t.names.at(id);
}

EnumTypeId register_enum(const std::string& name, std::vector<std::string> tags) {
  auto& t = enum_table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.ids.find(name);
  if (it != t.ids.end()) return it->second;
  EnumTypeId id = static_cast<EnumTypeId>(t.infos.size());
  t.infos.push_back(EnumInfo{name, std::move(tags)});
  t.ids.emplace(name, id);
  return id;
}

EnumTypeId enum_type_by_name(const std::string& name) {
  auto& t = enum_table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.ids.find(name);
  if (it == t.ids.end()) throw std::runtime_error("unknown enum type: " + name);
  return it->second;
}

const std::string& enum_type_name(EnumTypeId id) {
  auto& t = enum_table();
  std::lock_guard<std::mutex> lock(t.mu);
  return t.infos.at(id).name;
}

const std::vector<std::string>& enum_tags(EnumTypeId id) {
  auto& t = enum_table();
  std::lock_guard<std::mutex> lock(t.mu);
  return t.infos.at(id).tags;
}

EnumTypeId Enums::perm() {
  static EnumTypeId id = register_enum("perm", {"O", "R", "RW", "E"});
  return id;
}

EnumTypeId Enums::priv() {
  static EnumTypeId id = register_enum("priv", {"User", "Machine"});
  return id;
}

EnumTypeId Enums::access() {
  static EnumTypeId id =
      register_enum("access", {"Read", "Write", "ReadWrite", "Execute"});
  return id;
}

EnumTypeId Enums::mcreg() {
  static EnumTypeId id = register_enum("mcreg", {"R0", "R1", "R2", "R3"});
  return id;
}

Value Value::ctor(SymId tag, ValueVec fields) {
  Value v;
  v.kind_ = Kind::Ctor;
  v.ctor_tag_ = tag;
  v.num_ = 0;
  v.fields_ = std::make_shared<const ValueVec>(std::move(fields));
  return v;
}

Value Value::tuple(ValueVec fields) {
  Value v;
  v.kind_ = Kind::Tuple;
  v.num_ = 0;
  v.fields_ = std::make_shared<const ValueVec>(std::move(fields));
  return v;
}

bool Value::operator==(const Value& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case Kind::Unit:
      return true;
    case Kind::Bool:
    case Kind::Int:
      return num_ == o.num_;
    case Kind::Enum:
      return enum_type_ == o.enum_type_ && num_ == o.num_;
    case Kind::Ctor:
      if (ctor_tag_ != o.ctor_tag_) return false;
      break;
    case Kind::Tuple:
      break;
  }
  const ValueVec& a = *fields_;
  const ValueVec& b = *o.fields_;
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] == b[i])) return false;
  }
  return true;
}

std::string Value::str() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Unit:
      os << "()";
      break;
    case Kind::Bool:
      os << (num_ ? "true" : "false");
      break;
    case Kind::Int:
      os << num_;
      break;
    case Kind::Enum:
      os << enum_tags(enum_type_).at(static_cast<size_t>(num_));
      break;
    case Kind::Ctor: {
      os << sym_name(ctor_tag_) << "(";
      const ValueVec& fs = *fields_;
      for (size_t i = 0; i < fs.size(); ++i) {
        if (i) os << ", ";
        os << fs[i].str();
      }
      os << ")";
      break;
    }
    case Kind::Tuple: {
      os << "(";
      const ValueVec& fs = *fields_;
      for (size_t i = 0; i < fs.size(); ++i) {
        if (i) os << ", ";
        os << fs[i].str();
      }
      os << ")";
      break;
    }
  }
  return os.str();
}

Value perm_value(PermTag p) { return Value::enum_of(Enums::perm(), p); }
Value priv_value(PrivTag p) { return Value::enum_of(Enums::priv(), p); }
Value access_value(AccessTag a) { return Value::enum_of(Enums::access(), a); }

}  // namespace contractile
