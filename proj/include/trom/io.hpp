#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trom/hosvd.hpp"
#include "trom/tensor.hpp"

namespace trom::io {

/// Snapshot tensor binary format: magic "TROM", u32 version, dims (N, T, P)
/// as u64 triple, then N*T*P little-endian f64 values column-major.
void write_tensor(const std::string& path, const Tensor3& x);
Tensor3 read_tensor(const std::string& path);

/// Factorization binary format: magic "TROMF", u32 version, u8 weighted flag,
/// ranks and data dims as u64, then core/W/T/S as dense f64 blocks and the
/// delta/epsilon certificates as trailing f64s. The weight operator itself is
/// not serialized; callers re-attach it when the flag is set.
void write_factors(const std::string& path, const TuckerFactors& f);
TuckerFactors read_factors(const std::string& path,
                           std::shared_ptr<const SpdOperator> weighting = nullptr);

/// CSV with "%.17g" formatting so identical data produces identical bytes.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace trom::io
