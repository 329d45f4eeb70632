"""Complex-valued fractional Brownian fields: synthesis, subsampling, and
reconstruction by local averaging, thin-plate splines, and compressive
sampling, with a benchmark harness for comparing the three."""

from .baselines import (
    BoxcarConfig,
    ThinPlateConfig,
    boxcar_reconstruct,
    default_smoothing_p,
    thin_plate_coefficients,
    thin_plate_reconstruct,
)
from .cs import (
    AUTO_LAMBDA_FACTOR,
    EqualitySolverConfig,
    TwistConfig,
    bp_reconstruct,
    compressibility_diagnostics,
    tv,
    tv_denoise,
    tv_equality_reconstruct,
    tv_per_channel,
    twist_reconstruct,
)
from .fileio import (
    read_cvf1,
    read_mask_csv,
    read_samples_csv,
    write_cvf1,
    write_mask_csv,
    write_pgm,
    write_samples_csv,
)
from .grid import (
    SampleSet,
    as_field,
    dft2,
    idft2,
    mirror_extend,
    mirror_extend_samples,
    take_quadrant,
)
from .harness import (
    ExperimentSpec,
    ResultRow,
    SynthesisOptions,
    derive_seed,
    emit_figure_data,
    mean_table,
    run_table1,
    run_table2,
    spec_from_json,
    spec_to_json,
    table1_spec,
    table2_spec,
    write_mean_csv,
    write_results_csv,
)
from .metrics import EvalReport, evaluate, mse, radial_spectrum_slope, rmse, snr_db
from .psf import (
    MomentTensor,
    RadialProfile,
    brightness_moments,
    ellipticity_from_moments,
    psf_radius,
    render_star,
    shear_coords,
)
from .sampling import (
    MeasurementOperator,
    coherence_spike_fourier,
    random_mask,
    sample_count_bound,
    subsample,
)
from .synthesis import (
    normalize_dynamic_range,
    radial_frequency,
    spectral_envelope,
    synthesize_cvfbm,
)

__version__ = "1.0.0"

__all__ = [
    "AUTO_LAMBDA_FACTOR",
    "BoxcarConfig",
    "EqualitySolverConfig",
    "EvalReport",
    "ExperimentSpec",
    "MeasurementOperator",
    "MomentTensor",
    "RadialProfile",
    "ResultRow",
    "SampleSet",
    "SynthesisOptions",
    "ThinPlateConfig",
    "TwistConfig",
    "as_field",
    "boxcar_reconstruct",
    "bp_reconstruct",
    "brightness_moments",
    "coherence_spike_fourier",
    "compressibility_diagnostics",
    "default_smoothing_p",
    "derive_seed",
    "dft2",
    "ellipticity_from_moments",
    "emit_figure_data",
    "evaluate",
    "idft2",
    "mean_table",
    "mirror_extend",
    "mirror_extend_samples",
    "mse",
    "normalize_dynamic_range",
    "psf_radius",
    "radial_frequency",
    "radial_spectrum_slope",
    "random_mask",
    "read_cvf1",
    "read_mask_csv",
    "read_samples_csv",
    "render_star",
    "rmse",
    "run_table1",
    "run_table2",
    "sample_count_bound",
    "shear_coords",
    "snr_db",
    "spec_from_json",
    "spec_to_json",
    "spectral_envelope",
    "subsample",
    "synthesize_cvfbm",
    "table1_spec",
    "table2_spec",
    "take_quadrant",
    "thin_plate_coefficients",
    "thin_plate_reconstruct",
    "tv",
    "tv_denoise",
    "tv_equality_reconstruct",
    "tv_per_channel",
    "twist_reconstruct",
    "write_cvf1",
    "write_mask_csv",
    "write_mean_csv",
    "write_pgm",
    "write_results_csv",
    "write_samples_csv",
]
