#pragma once

#include "cinerad/core/checksum.hpp"
#include "cinerad/core/log.hpp"
#include "cinerad/core/ndarray.hpp"
#include "cinerad/core/npy.hpp"
#include "cinerad/core/parallel.hpp"
#include "cinerad/core/rng.hpp"
#include "cinerad/core/types.hpp"
#include "cinerad/core/validate.hpp"

#include "cinerad/nufft/fftw.hpp"
#include "cinerad/nufft/nufft.hpp"

#include "cinerad/phantom/phantom.hpp"

#include "cinerad/preprocess/binning.hpp"
#include "cinerad/preprocess/dcf.hpp"
#include "cinerad/preprocess/phase_correct.hpp"
#include "cinerad/preprocess/prewhiten.hpp"
#include "cinerad/preprocess/trajectory.hpp"

#include "cinerad/coil/regions.hpp"
#include "cinerad/coil/removal.hpp"
#include "cinerad/coil/sinogram.hpp"
#include "cinerad/coil/soc.hpp"
#include "cinerad/coil/svd.hpp"

#include "cinerad/metrics/metrics.hpp"

#include "cinerad/recon/cg.hpp"
#include "cinerad/recon/igrasp.hpp"
#include "cinerad/recon/resnet.hpp"
#include "cinerad/recon/sense.hpp"
#include "cinerad/recon/tv.hpp"
#include "cinerad/recon/unrolled.hpp"

#include "cinerad/pipeline/config.hpp"
#include "cinerad/pipeline/pgm.hpp"
#include "cinerad/pipeline/pipeline.hpp"
#include "cinerad/pipeline/report.hpp"
