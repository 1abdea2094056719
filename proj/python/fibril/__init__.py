"""Python bindings for the fibril engine."""

from ._fibril import (  # noqa: F401
    FibrilError,
    Model,
    __version__,
    drifts,
    frame,
    greens_zero_momentum,
    haar_average_of_irrep,
    jacobian_integrand,
    jacobian_integrand_oracle,
    make_model,
    simulate,
    validate_model,
    verify_all,
)
