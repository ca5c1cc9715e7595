"""Coupling-tiltable underwater quadrotor workbench bindings."""

try:
    from ._alioth import (
        ConfigError,
        LevelingConstraints,
        ModelError,
        SttaSet,
        VehicleParams,
        apply_input_pattern,
        cem,
        coriolis_matrix,
        damping_matrix,
        default_config,
        leveling_constraints,
        mass_matrix,
        moment_coeffs,
        nussbaum_value,
        restoring_vector,
        simulate,
        stta_set,
    )
except ImportError:  # module built next to the package, not inside it
    from _alioth import (
        ConfigError,
        LevelingConstraints,
        ModelError,
        SttaSet,
        VehicleParams,
        apply_input_pattern,
        cem,
        coriolis_matrix,
        damping_matrix,
        default_config,
        leveling_constraints,
        mass_matrix,
        moment_coeffs,
        nussbaum_value,
        restoring_vector,
        simulate,
        stta_set,
    )

__all__ = [
    "ConfigError",
    "LevelingConstraints",
    "ModelError",
    "SttaSet",
    "VehicleParams",
    "apply_input_pattern",
    "cem",
    "coriolis_matrix",
    "damping_matrix",
    "default_config",
    "leveling_constraints",
    "mass_matrix",
    "moment_coeffs",
    "nussbaum_value",
    "restoring_vector",
    "simulate",
    "stta_set",
]
