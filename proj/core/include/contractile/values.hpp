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

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace contractile {

/// Interned symbol. Ids are stable for the lifetime of the process and
/// identical strings always intern to the same id.
using SymId = uint32_t;

SymId intern(const std::string& s);
const std::string& sym_name(SymId id);

/// Enumeration types used by machine values (permissions, privileges, ...).
/// Each enum type has a dense tag space 0..size-1.
using EnumTypeId = uint16_t;

EnumTypeId register_enum(const std::string& name, std::vector<std::string> tags);
EnumTypeId enum_type_by_name(const std::string& name);
const std::string& enum_type_name(EnumTypeId t);
const std::vector<std::string>& enum_tags(EnumTypeId t);

/// Builtin enum types, registered eagerly.
struct Enums {
  static EnumTypeId perm();    // O, R, RW, E
  static EnumTypeId priv();    // User, Machine
  static EnumTypeId access();  // Read, Write, ReadWrite, Execute
  static EnumTypeId mcreg();   // R0..R3
};

// Tag indices for the builtin enums.
enum PermTag : uint8_t { kPermO = 0, kPermR = 1, kPermRW = 2, kPermE = 3 };
enum PrivTag : uint8_t { kPrivUser = 0, kPrivMachine = 1 };
enum AccessTag : uint8_t {
  kAccRead = 0,
  kAccWrite = 1,
  kAccReadWrite = 2,
  kAccExecute = 3
};

class Value;
using ValueVec = std::vector<Value>;

/// A machine/logic value. Scalars are stored inline; constructor and tuple
/// payloads are shared immutable vectors so copies stay cheap.
class Value {
 public:
  enum class Kind : uint8_t { Unit, Bool, Int, Enum, Ctor, Tuple };

  Value() : kind_(Kind::Unit), num_(0) {}

  static Value unit() { return Value(); }
  static Value boolean(bool b) {
    Value v;
    v.kind_ = Kind::Bool;
    v.num_ = b ? 1 : 0;
    return v;
  }
  static Value integer(int64_t n) {
    Value v;
    v.kind_ = Kind::Int;
    v.num_ = n;
    return v;
  }
  static Value enum_of(EnumTypeId t, uint8_t tag) {
    Value v;
    v.kind_ = Kind::Enum;
    v.enum_type_ = t;
    v.num_ = tag;
    return v;
  }
  static Value ctor(SymId tag, ValueVec fields);
  static Value tuple(ValueVec fields);

  Kind kind() const { return kind_; }
  bool is_unit() const { return kind_ == Kind::Unit; }
  bool is_bool() const { return kind_ == Kind::Bool; }
  bool is_int() const { return kind_ == Kind::Int; }
  bool is_enum() const { return kind_ == Kind::Enum; }
  bool is_ctor() const { return kind_ == Kind::Ctor; }
  bool is_tuple() const { return kind_ == Kind::Tuple; }

  bool as_bool() const { return num_ != 0; }
  int64_t as_int() const { return num_; }
  EnumTypeId enum_type() const { return enum_type_; }
  uint8_t enum_tag() const { return static_cast<uint8_t>(num_); }
  SymId ctor_tag() const { return ctor_tag_; }
  const ValueVec& fields() const { return *fields_; }

  bool operator==(const Value& o) const;
  bool operator!=(const Value& o) const { return !(*this == o); }

  std::string str() const;

 private:
  Kind kind_;
  EnumTypeId enum_type_ = 0;
  SymId ctor_tag_ = 0;
  int64_t num_;
  std::shared_ptr<const ValueVec> fields_;
};

// Convenience constructors for the builtin enums.
Value perm_value(PermTag p);
Value priv_value(PrivTag p);
Value access_value(AccessTag a);

}  // namespace contractile
