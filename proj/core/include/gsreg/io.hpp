#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "gsreg/bvm.hpp"
#include "gsreg/families.hpp"
#include "gsreg/posterior.hpp"
#include "gsreg/types.hpp"

namespace gsreg {

using Json = nlohmann::json;

// Vectors serialize as arrays, matrices as {rows, cols, data} with data in
// row-major order. Doubles survive a round trip bit-exactly (shortest
// round-trip formatting).
Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);
Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

Json dataset_to_json(const GroupedDataset& data);
GroupedDataset dataset_from_json(const Json& j);
void save_dataset(const std::string& path, const GroupedDataset& data);
GroupedDataset load_dataset(const std::string& path);

/// Family parameters tagged by a "family" name field.
Json family_to_json(const FamilyParams& params);
FamilyParams family_from_json(const Json& j);

Json sparse_vector_to_json(const SparseVector& v);
SparseVector sparse_vector_from_json(const Json& j);

Json mixture_to_json(const SupportMixture& mix);
SupportMixture mixture_from_json(const Json& j);
void save_mixture(const std::string& path, const SupportMixture& mix);
SupportMixture load_mixture(const std::string& path);

/// One line-delimited record per kept chain state:
/// {iter, support, theta, eta, log_posterior}.
void write_chain_records(const std::string& path, const McmcChain& chain);
std::vector<Json> read_records(const std::string& path);

/// Parses a config file (JSON text). Throws std::invalid_argument with the
/// file context when the file is unreadable or unparsable.
Json load_config(const std::string& path);

/// Rejects keys of `obj` outside `allowed`; `context` names the object in
/// the error message.
void require_keys(const Json& obj, const std::vector<std::string>& allowed,
                  const std::string& context);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace gsreg
