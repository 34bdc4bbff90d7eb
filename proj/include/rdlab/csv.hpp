#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rdlab/chain.hpp"
#include "rdlab/diffusion.hpp"
#include "rdlab/field.hpp"
#include "rdlab/geometry.hpp"
#include "rdlab/wavelet.hpp"

namespace rdlab {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// %.17g — decimal text that round-trips binary64 exactly.
std::string format_double(double v);

// Hex object id of the content as git would compute it for a blob: SHA-1 of
// "blob <size>\0" + content. Used by manifests to fingerprint inputs.
std::string git_blob_sha1(std::string_view content);

// Observation table `i,t,x1,...,xd` with t = i * D, plus a JSON sidecar
// carrying D, N, seed and the truth label. The pair round-trips exactly:
// doubles are printed with 17 significant digits.
void write_observations(const std::string& csv_path, const std::string& sidecar_path,
                        const ObservationSet& obs);
ObservationSet read_observations(const std::string& csv_path, const std::string& sidecar_path);

// Coefficient table `l,kind,r1,...,rd,value`, one row per basis index.
void write_coefficients(const std::string& path, const BasisSpec& basis, const CoeffVector& c);
CoeffVector read_coefficients(const std::string& path, const BasisSpec& basis);

// Lattice dump `x1,...,xd,f_hat,f_hat_star` over the domain's bounding box,
// n points per axis (cell midpoints).
void write_field_dump(const std::string& path, const ScalarField& f_hat,
                      const ScalarField& f_hat_star, const DomainSpec& dom, int n_per_axis);

// Kept-state trace `iter,loglik,accept,l2_to_truth`; iter is the ordinal of
// the kept state, l2_to_truth is "nan" when the chain ran without a truth.
void write_chain_trace(const std::string& path, const PosteriorSummary& summary);

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

// Reader for the numeric tables above: header cells plus one parsed row per
// line. Non-numeric cells (the coefficient table's kind column) come back as
// NaN and are recovered through the header / basis lookup instead.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<std::string>> raw_rows;
};
CsvTable read_csv_table(const std::string& path);

}  // namespace rdlab
