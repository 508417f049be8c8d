#ifndef CRDT_SERIALIZE_HPP
#define CRDT_SERIALIZE_HPP

#include <json.hpp>

#include "crdt/checker.hpp"

namespace crdt {

using Json = nlohmann::ordered_json;

// Values: integers as numbers; {"str"}, {"set"}, {"tuple"}, {"map": [[k, v]...]}, {"msg"}.
Json to_json(const Value& v, const Roster& roster);
Value value_from_json(const Json& j, const Roster& roster);

Json to_json(const Event& e, const Roster& roster);
Event event_from_json(const Json& j, const Roster& roster);

Json to_json(const Label& l, const Roster& roster);
Json to_json(const Stats& s);
Json to_json(const QueryProbe& p, const Roster& roster);
Json to_json(const Failure& f, const Roster& roster);
Json to_json(const std::vector<WitnessStep>& w, const Roster& roster);
std::vector<WitnessStep> witness_from_json(const Json& j, const Roster& roster);
Json to_json(const Verdict& v, const Roster& roster);

Side side_from_string(const std::string& s);

}  // namespace crdt

#endif  // CRDT_SERIALIZE_HPP
