"""Gaussian-state phase estimation: covariance engine, fidelity QFI, readouts and a Fock oracle."""
from .fidelity import QfiEstimate, SchemeFamily, gaussian_fidelity, qfi_fidelity
from .formulas import closed_form
from .gaussian_core import (GaussianState, InvalidStateError, LossChannel, SymplecticOp, apply,
                            apply_loss, beamsplitter_5050, displacement, mean_photon,
                            one_mode_squeezer, phase_shifter, two_mode_squeezer, vacuum)
from .observables import (QuadraticObservable, UnusableWorkingPoint, error_propagation,
                          expectation, ladder_to_quadratic, sld_pure, variance)
from .schemes import (PrecisionCurve, SchemeConfig, build_family, coherent_benchmark_qfi,
                      fisher_vs_phi, fwhm, fwhm_scaling, su11_factor_check)

__version__ = "0.1.0"
