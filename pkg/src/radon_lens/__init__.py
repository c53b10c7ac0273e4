"""Radon and generalized Radon transforms of empirical data distributions.

The package views a classifier node as a slicing operator: projecting
sample points through a defining function g(x, theta) and estimating the
1-D density of the values is exactly a slice of the (generalized) Radon
transform of the data distribution.  Submodules:

* ``dataset`` -- point-cloud containers, toy samplers, CSV I/O
* ``defining_fn`` -- linear / circular / polynomial / perceptron g families
* ``empirical_radon`` -- slices, sinograms, and push-forward densities
* ``grid_radon`` -- gridded forward transform and filtered back-projection
* ``nn`` -- stacked perceptrons with exact gradients and pooling operators
* ``train`` -- logistic-loss gradient descent with unit-norm projection
* ``adversarial`` -- decision-boundary crossing by gradient walks
* ``levelset`` -- marching-squares level curves of any defining function
* ``cli`` -- figure-reproduction pipelines emitting CSV/JSON/SVG
"""

from .dataset import (
    EmpiricalDistribution,
    LabeledDataset,
    load_csv,
    sample_gaussian,
    sample_halfmoon,
    save_csv,
)
from .defining_fn import (
    CircularProjection,
    DefiningFunction,
    HomogeneousPolynomial,
    LinearProjection,
    MlpSurface,
    SigmoidHead,
    check_homogeneity,
    enumerate_multi_indices,
    linear_from_angle,
)
from .empirical_radon import (
    Density1D,
    Sinogram,
    Slice,
    estimate_density,
    ks_distance,
    project_samples,
    radon_slice,
    rvt_pushforward,
    sinogram,
)
from .grid_radon import (
    GridImage,
    GridSinogram,
    RampFilterSpec,
    apply_ramp_filter,
    fbp_reconstruct,
    forward_radon_grid,
    fourier_slice_residual,
    gaussian_phantom,
)
from .levelset import LevelCurveSet, default_levels, marching_squares, surface_grid
from .nn import (
    Activation,
    MlpModel,
    avgpool_as_matrix,
    maxpool_surface,
    mlp_forward,
    mlp_from_arch,
    mlp_grad_input,
    mlp_grad_params,
    random_mlp,
)
from .adversarial import PerturbResult, perturb
from .train import FitResult, TrainConfig, bce_loss, fit

__version__ = "0.1.0"
