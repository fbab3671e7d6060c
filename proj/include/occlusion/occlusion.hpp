#pragma once

#include "occlusion/error.hpp"
#include "occlusion/core/hash.hpp"
#include "occlusion/core/manifest.hpp"
#include "occlusion/core/rng.hpp"
#include "occlusion/core/spec.hpp"
#include "occlusion/camera/convolution.hpp"
#include "occlusion/camera/dirt.hpp"
#include "occlusion/camera/image.hpp"
#include "occlusion/camera/scratch.hpp"
#include "occlusion/camera/soiling.hpp"
#include "occlusion/camera/textures.hpp"
#include "occlusion/camera/water_blur.hpp"
#include "occlusion/pointcloud/occlusion.hpp"
#include "occlusion/pointcloud/point_cloud.hpp"
#include "occlusion/io/dataset.hpp"
#include "occlusion/io/files.hpp"
#include "occlusion/io/image_codec.hpp"
#include "occlusion/io/lidar_bin.hpp"
#include "occlusion/io/pcd.hpp"
#include "occlusion/validation/checks.hpp"
#include "occlusion/validation/report.hpp"
#include "occlusion/validation/ssim.hpp"
#include "occlusion/pipeline/job.hpp"
#include "occlusion/pipeline/occlude.hpp"
#include "occlusion/pipeline/parallel.hpp"
#include "occlusion/pipeline/presets.hpp"
#include "occlusion/pipeline/validate.hpp"
