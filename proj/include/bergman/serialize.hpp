#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "bergman/construct.hpp"
#include "bergman/verification.hpp"

namespace bergman {

// Insertion-ordered so that files read in the order they were written.
// Doubles are written in shortest round-trip form; Coord values as the list
// of doubles whose exact sum they are.
using Json = nlohmann::ordered_json;

Json to_json(const Coord& x);
Json to_json(const Point& p);
Json to_json(const Primitive& p);
Json to_json(const RunParameters& p);
Json to_json(const ConeDecomposition& d);
Json to_json(const CertifiedMoment& m);
Json to_json(const DivergenceCertificate& c);
Json to_json(const AssembledBackground& bg);
Json to_json(const ConstructedDomain& d);
Json to_json(const ConstructResult& r);  // solver report
Json to_json(const VerificationReport& r);

// Readers throw ParseError on malformed or incomplete input and
// ValidationError on well-formed input that violates a precondition.
Coord coord_from_json(const Json& j);
Point point_from_json(const Json& j);
Primitive primitive_from_json(const Json& j);
RunParameters run_parameters_from_json(const Json& j);
ConeDecomposition decomposition_from_json(const Json& j);
ConstructedDomain domain_from_json(const Json& j);

// tau_k, residual and step per iteration
std::string iterate_csv(const SolverReport& r);

// Both throw IoError when the file cannot be opened or written; the reader
// throws ParseError on malformed JSON.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string dump(const Json& j);

}  // namespace bergman
