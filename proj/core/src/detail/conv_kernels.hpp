#pragma once

#include <utility>

#include "cliffkern/conv.hpp"

namespace cliffkern::detail {

/// Resolves the packed kernel once per layer. Returns the interpreted kernel
/// when `force_interpreted` is set or no specialization exists for
/// (signature, W, U).
std::pair<KernelPath, ConvLayer::PackedKernelFn> select_packed_kernel(const Signature& sig,
                                                                      const KernelParams& params,
                                                                      bool force_interpreted);

}  // namespace cliffkern::detail
