// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "paftrack/io_error.hpp"
#include "paftrack/topology.hpp"
#include "paftrack/types.hpp"

namespace paftrack {

struct AnnotationDocument {
    SequenceAnnotation sequence;
    SkeletonTopology topology;
};

// Canonical text form: fixed key order, numbers in %.6g. Serializing a loaded
// document reproduces the input byte for byte.
std::string serialize_annotation(const AnnotationDocument& doc);

// Parses and validates; throws IoError with a positioned diagnostic.
AnnotationDocument parse_annotation(const std::string& text);

void save_annotation_file(const std::string& path, const AnnotationDocument& doc);
AnnotationDocument load_annotation_file(const std::string& path);

// Shared numeric formatting for the text formats (6 significant digits).
std::string format_g6(double v);

}  // namespace paftrack
