// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "paftrack/io_error.hpp"
#include "paftrack/types.hpp"

namespace paftrack {

// Binary field tensor format, little-endian:
//   "PFLD", u16 version, u16 reserved(0),
//   u32 width, height, scale_factor,
//   u32 visible, occluded, paf_pairs, taf_pairs, mask channel counts,
//   then row-major f32 planes: visible, occluded, paf (x,y per limb),
//   taf (x,y per kind), mask. Payload length must match the header exactly.
// Stacks are self-delimiting, so files may concatenate several.

std::string serialize_field_stack(const FieldStack& stack);

// Parses one stack starting at `offset`, advancing it past the record.
FieldStack parse_field_stack(const std::uint8_t* data, std::size_t size, std::size_t& offset);

// Parses a whole buffer of concatenated stacks; rejects trailing bytes.
std::vector<FieldStack> parse_field_stream(const std::uint8_t* data, std::size_t size);

void save_field_file(const std::string& path, const std::vector<FieldStack>& stacks);
std::vector<FieldStack> load_field_file(const std::string& path);

// Streaming reader: nullopt at a clean end of stream.
std::optional<FieldStack> read_field_stack(std::istream& in);
void write_field_stack(std::ostream& out, const FieldStack& stack);

}  // namespace paftrack
